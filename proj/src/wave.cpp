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

#include "condscat/wave.hpp"

#include <algorithm>
#include <cmath>

#include "condscat/csv.hpp"
#include "condscat/specfun.hpp"

namespace condscat {

Incident Incident::plane(double k, double theta_d) {
  Incident w;
  w.kind = Kind::Plane;
  w.k = k;
  w.theta_d = theta_d;
  w.validate();
  return w;
}

Incident Incident::herglotz(double k, std::vector<cplx> kernel) {
  Incident w;
  w.kind = Kind::Herglotz;
  w.k = k;
  w.kernel = std::move(kernel);
  w.validate();
  return w;
}

Incident Incident::point_source(double k, Vec2 z0) {
  Incident w;
  w.kind = Kind::PointSource;
  w.k = k;
  w.z0 = z0;
  w.validate();
  return w;
}

void Incident::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("wavenumber must be positive");
  if (kind == Kind::Herglotz && kernel.empty()) throw DomainError("Herglotz kernel has no samples");
  if (kind == Kind::PointSource && norm(z0) == 0.0)
    throw DomainError("point source must not sit at the origin");
}

cplx Incident::value(const Vec2& x) const {
  switch (kind) {
    case Kind::Plane:
      return std::exp(kI * k * (x.x * std::cos(theta_d) + x.y * std::sin(theta_d)));
    case Kind::Herglotz: {
      const std::size_t M = kernel.size();
      cplx s{};
      for (std::size_t j = 0; j < M; ++j) {
        const double xi = 2 * kPi * j / M;
        s += kernel[j] * std::exp(kI * k * (x.x * std::cos(xi) + x.y * std::sin(xi)));
      }
      return s * (2 * kPi / M);
    }
    case Kind::PointSource:
      return specfun::cyl_bessel(specfun::BesselKind::H1, 0, k * dist(x, z0));
  }
  return {};
}

std::array<cplx, 2> Incident::gradient(const Vec2& x) const {
  switch (kind) {
    case Kind::Plane: {
      const cplx u = value(x);
      return {kI * k * std::cos(theta_d) * u, kI * k * std::sin(theta_d) * u};
    }
    case Kind::Herglotz: {
      const std::size_t M = kernel.size();
      std::array<cplx, 2> g{};
      for (std::size_t j = 0; j < M; ++j) {
        const double xi = 2 * kPi * j / M;
        const cplx e = kernel[j] * std::exp(kI * k * (x.x * std::cos(xi) + x.y * std::sin(xi)));
        g[0] += kI * k * std::cos(xi) * e;
        g[1] += kI * k * std::sin(xi) * e;
      }
      for (auto& v : g) v *= 2 * kPi / M;
      return g;
    }
    case Kind::PointSource: {
      const double r = dist(x, z0);
      const cplx h1 = specfun::cyl_bessel(specfun::BesselKind::H1, 1, k * r);
      return {-k * h1 * (x.x - z0.x) / r, -k * h1 * (x.y - z0.y) / r};
    }
  }
  return {};
}

std::vector<cplx> Incident::modal(int N) const {
  if (N < 0) throw DomainError("modal truncation must be non-negative");
  std::vector<cplx> c(2 * N + 1);
  const auto ipow = [](int n) {
    static const cplx p[4] = {1.0, kI, -1.0, -kI};
    return p[((n % 4) + 4) % 4];
  };
  switch (kind) {
    case Kind::Plane:
      for (int n = -N; n <= N; ++n) c[n + N] = ipow(n) * std::exp(-kI * (n * theta_d));
      break;
    case Kind::Herglotz: {
      const int M = static_cast<int>(kernel.size());
      if (M < 2 * N + 1)
        throw DomainError("Herglotz kernel needs at least " + std::to_string(2 * N + 1) + " samples");
      for (int n = -N; n <= N; ++n) {
        cplx g{};
        for (int j = 0; j < M; ++j) g += kernel[j] * std::exp(-kI * (2 * kPi * n * j / M));
        c[n + N] = ipow(n) * (2 * kPi / M) * g;
      }
      break;
    }
    case Kind::PointSource: {
      // Graf: H_0(k|x - z0|) = sum_n H_n(k|z0|) J_n(k|x|) e^{i n (theta - theta0)}, |x| < |z0|.
      const double r0 = norm(z0), t0 = std::atan2(z0.y, z0.x);
      const auto H = specfun::hankel1_seq(N, k * r0);
      for (int n = -N; n <= N; ++n) {
        const cplx h = n < 0 && (-n) % 2 ? -H[-n] : H[std::abs(n)];
        c[n + N] = h * std::exp(-kI * (n * t0));
      }
      break;
    }
  }
  return c;
}

std::string Incident::describe() const {
  switch (kind) {
    case Kind::Plane:
      return "plane(theta_d=" + format_double(theta_d) + ", k=" + format_double(k) + ")";
    case Kind::Herglotz:
      return "herglotz(M=" + std::to_string(kernel.size()) + ", k=" + format_double(k) + ")";
    case Kind::PointSource:
      return "point_source(z0=(" + format_double(z0.x) + "," + format_double(z0.y) +
             "), k=" + format_double(k) + ")";
  }
  return {};
}

std::vector<double> uniform_directions(int M) {
  if (M < 1) throw DomainError("need at least one direction");
  std::vector<double> t(M);
  for (int j = 0; j < M; ++j) t[j] = 2 * kPi * j / M;
  return t;
}

double FarFieldPattern::l2_norm() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (const cplx& v : values) s += std::norm(v);
  return std::sqrt(s * 2 * kPi / values.size());
}

double FarFieldPattern::max_abs() const {
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v));
  return m;
}

double l2_difference(const FarFieldPattern& a, const FarFieldPattern& b) {
  if (a.values.size() != b.values.size()) throw DomainError("far-field grids differ");
  FarFieldPattern d{a.theta, a.values};
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return d.l2_norm();
}

double relative_l2(const FarFieldPattern& a, const FarFieldPattern& b) {
  const double nb = b.l2_norm();
  if (nb == 0.0) throw DomainError("reference far field vanishes");
  return l2_difference(a, b) / nb;
}

void write_farfield_csv(std::ostream& os, const FarFieldPattern& ff) {
  os << "theta,re,im\n";
  for (std::size_t i = 0; i < ff.values.size(); ++i)
    write_csv_row(os, {ff.theta[i], ff.values[i].real(), ff.values[i].imag()});
}

}  // namespace condscat
