// Copyright 2026 The condscat Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "condscat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace condscat::quad {

namespace {

Rule build_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

// Kronrod 15 nodes (positive half) and weights; Gauss 7 weights at odd positions.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double err;
  double absval;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx rk = fc * kWgk[7];
  cplx rg = fc * kWg[3];
  double ra = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx f1 = f(c - dx);
    const cplx f2 = f(c + dx);
    rk += kWgk[j] * (f1 + f2);
    ra += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, rk * h, std::abs((rk - rg) * h), ra * std::abs(h)};
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int order,
                  int panels) {
  const Rule& r = gauss_legendre(order);
  const double w = (b - a) / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    const double c = lo + 0.5 * w;
    for (int i = 0; i < order; ++i) sum += r.weights[i] * f(c + 0.5 * w * r.nodes[i]);
  }
  return sum * (0.5 * w);
}

AdaptiveResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                  double tol, int max_intervals) {
  AdaptiveResult out;
  out.value = 0.0;
  if (a == b) return out;
  // Global subdivision: always split the panel with the largest error estimate.
  auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  heap.push(gk15(f, a, b));
  out.evaluations = 15;
  cplx total = heap.top().value;
  double err = heap.top().err, absval = heap.top().absval;
  while (static_cast<int>(heap.size()) < max_intervals) {
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * absval;
    if (err <= std::max(tol * std::abs(total), floor)) break;
    const Panel p = heap.top();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) break;
    heap.pop();
    const Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
    out.evaluations += 30;
    total += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    absval += l.absval + r.absval - p.absval;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to avoid drift from the running updates.
  total = 0.0;
  err = 0.0;
  absval = 0.0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    total += p.value;
    err += p.err;
    absval += p.absval;
  }
  out.value = total;
  out.error_estimate = err;
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * absval;
  out.converged = err <= std::max(tol * std::abs(total), floor);
  return out;
}

const TriangleRule& triangle_rule7() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151;
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563;
    const double w0 = 0.225, w1 = 0.1323941527885062, w2 = 0.1259391805448271;
    r.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
              {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    r.weights = {w0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

}  // namespace condscat::quad
