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

#include <cmath>
#include <random>
#include <sstream>

#include "condscat/quadrature.hpp"
#include "condscat/scatter_disk.hpp"
#include "condscat/specfun.hpp"
#include "doctest.h"

using namespace condscat;
using namespace condscat::disk;

namespace {

DiskScatterer single(double R, cplx q, cplx eta) { return {{R}, {q}, {eta}}; }

DiskScatterer three_layer() {
  return {{1.5, 1.0, 0.4}, {cplx{2.0, 0.0}, cplx{0.5, 0.0}, cplx{3.0, 0.0}}, {0.7, -0.3, 1.2}};
}

}  // namespace

TEST_SUITE("disk") {
  TEST_CASE("incident plane wave and its modal expansion") {
    const Incident w = Incident::plane(3.0, 0.8);
    CHECK(std::abs(w.value({0, 0}) - 1.0) < 1e-15);
    const double R = 2.0;
    const int N = static_cast<int>(std::ceil(3.0 * R)) + 15;
    const auto c = w.modal(N);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      Vec2 x{u(rng), u(rng)};
      if (norm(x) > 1) continue;
      x = {x.x * R, x.y * R};
      const double r = norm(x), t = std::atan2(x.y, x.x);
      cplx s{};
      for (int n = -N; n <= N; ++n) {
        const double jn = std::cyl_bessel_j(std::abs(n), 3.0 * r) * (n < 0 && (-n) % 2 ? -1.0 : 1.0);
        s += c[n + N] * jn * std::exp(kI * (n * t));
      }
      worst = std::max(worst, std::abs(s - w.value(x)));
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("Herglotz and point-source incident fields") {
    const Incident h = Incident::herglotz(2.0, std::vector<cplx>(64, 1.0));
    for (double r : {0.3, 1.1, 2.5}) {
      const Vec2 x{r * std::cos(0.4), r * std::sin(0.4)};
      CHECK(std::abs(h.value(x) - 2 * kPi * std::cyl_bessel_j(0, 2.0 * r)) < 1e-12);
    }
    const auto c = h.modal(10);
    for (int n = -10; n <= 10; ++n) CHECK(std::abs(c[n + 10] - (n == 0 ? 2 * kPi : 0.0)) < 1e-12);
    CHECK_THROWS_AS(h.modal(40), DomainError);

    const Incident p = Incident::point_source(1.5, {3.0, 1.0});
    const int N = 40;
    const auto cp = p.modal(N);
    const Vec2 x{0.5, -0.7};
    const double r = norm(x), t = std::atan2(x.y, x.x);
    cplx s{};
    for (int n = -N; n <= N; ++n)
      s += cp[n + N] * std::cyl_bessel_j(std::abs(n), 1.5 * r) * (n < 0 && (-n) % 2 ? -1.0 : 1.0) *
           std::exp(kI * (n * t));
    CHECK(std::abs(s - p.value(x)) < 1e-11);

    // Gradients against central differences.
    for (const Incident& w : {Incident::plane(2.0, 1.0), h, p}) {
      const Vec2 y{0.3, 0.9};
      const auto g = w.gradient(y);
      const double e = 1e-6;
      const cplx gx = (w.value({y.x + e, y.y}) - w.value({y.x - e, y.y})) / (2 * e);
      const cplx gy = (w.value({y.x, y.y + e}) - w.value({y.x, y.y - e})) / (2 * e);
      CHECK(std::abs(g[0] - gx) < 1e-7);
      CHECK(std::abs(g[1] - gy) < 1e-7);
    }
    CHECK_THROWS_AS(mie_solve(single(4.0, 2.0, 0.0), 1.5, p), DomainError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(DiskScatterer{}.validate(), DomainError);
    CHECK_THROWS_AS((DiskScatterer{{1.0, 1.0}, {1.0, 1.0}, {0.0, 0.0}}.validate()), DomainError);
    CHECK_THROWS_AS((DiskScatterer{{1.0}, {0.0}, {0.0}}.validate()), DomainError);
    CHECK_THROWS_AS((DiskScatterer{{1.0}, {1.0}, {}}.validate()), DomainError);
  }

  TEST_CASE("no scatterer, no scattering") {
    const auto sol = mie_solve(DiskScatterer{{1.5, 0.7}, {1.0, 1.0}, {0.0, 0.0}}, 2.0, Incident::plane(2.0, 0.3));
    for (cplx b : sol.b) CHECK(std::abs(b) < 1e-13);
    for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{1.0, -0.3}, Vec2{0.0, 0.0}, Vec2{2.0, 1.0}})
      CHECK(std::abs(field_sample(sol, x).value - sol.incident.value(x)) < 1e-10);
  }

  TEST_CASE("a purely conductive circle scatters") {
    const auto sol = mie_solve(single(1.0, 1.0, 0.5), 2.0, Incident::plane(2.0, 0.0));
    double mx = 0;
    for (cplx b : sol.b) mx = std::max(mx, std::abs(b));
    CHECK(mx > 1e-3);
    CHECK(sol.max_residual < 1e-10);
    // Oracle: the single-layer 2x2 system solved by Cramer's rule.
    const double k = 2.0;
    for (int m = 0; m <= 5; ++m) {
      const double J = std::cyl_bessel_j(m, k), Jp = 0.5 * (std::cyl_bessel_j(m - 1 < 0 ? 1 : m - 1, k) *
                                                            (m == 0 ? -1.0 : 1.0) - std::cyl_bessel_j(m + 1, k));
      const cplx H = cplx{J, std::cyl_neumann(m, k)};
      const double Yp = 0.5 * ((m == 0 ? -std::cyl_neumann(1, k) : std::cyl_neumann(m - 1, k)) - std::cyl_neumann(m + 1, k));
      const cplx Hp{Jp, Yp};
      // b H - a J = -J ; b (-k H' - eta H) + a k J' = k J' + eta J
      const double eta = 0.5;
      const cplx a11 = H, a12 = -J, a21 = -k * Hp - eta * H, a22 = k * Jp;
      const cplx r1 = -J, r2 = k * Jp + eta * J;
      const cplx det = a11 * a22 - a12 * a21;
      const cplx T = (r1 * a22 - a12 * r2) / det;
      CHECK(std::abs(sol.b[m + sol.N] - T * sol.c[m + sol.N]) < 1e-13);
    }
  }

  TEST_CASE("transmission residuals for every mode") {
    const auto sol = mie_solve(single(1.0, 2.0, 0.0), 1.0, Incident::plane(1.0, 0.0), 20);
    for (int n = -20; n <= 20; ++n)
      for (const auto& r : transmission_residuals(sol, n)) {
        CHECK(r[0] < 1e-10);
        CHECK(r[1] < 1e-10);
      }
    const auto sol3 = mie_solve(three_layer(), 2.5, Incident::plane(2.5, 1.1));
    CHECK(sol3.max_residual < 1e-10);
    const auto solc = mie_solve(DiskScatterer{{1.0, 0.5}, {cplx{2.0, 0.5}, cplx{1.5, -0.2}}, {cplx{0.3, 0.1}, 2.0}},
                                3.0, Incident::plane(3.0, 0.0));
    CHECK(solc.max_residual < 1e-10);
  }

  TEST_CASE("pointwise traces satisfy the conductive conditions") {
    const auto sol = mie_solve(three_layer(), 2.5, Incident::plane(2.5, 1.1));
    double wc = 0, wj = 0;
    for (std::size_t i = 0; i < sol.scatterer.layers(); ++i) {
      const double R = sol.scatterer.radii[i];
      for (int a = 0; a < 64; ++a) {
        const double t = 2 * kPi * a / 64;
        const auto [uo, duo] = radial_trace(sol, R, t, +1);
        const auto [ui, dui] = radial_trace(sol, R, t, -1);
        wc = std::max(wc, std::abs(uo - ui));
        wj = std::max(wj, std::abs(dui - duo - sol.scatterer.etas[i] * uo));
      }
    }
    CHECK(wc < 1e-9);
    CHECK(wj < 1e-9);
  }

  TEST_CASE("gradient of the total field") {
    const auto sol = mie_solve(three_layer(), 2.0, Incident::plane(2.0, 0.4));
    for (Vec2 x : {Vec2{0.1, 0.05}, Vec2{0.7, 0.2}, Vec2{-0.9, 0.8}, Vec2{2.0, -1.0}}) {
      const auto g = field_sample(sol, x).gradient;
      const double e = 1e-6;
      const cplx gx = (field_sample(sol, {x.x + e, x.y}).value - field_sample(sol, {x.x - e, x.y}).value) / (2 * e);
      const cplx gy = (field_sample(sol, {x.x, x.y + e}).value - field_sample(sol, {x.x, x.y - e}).value) / (2 * e);
      CHECK(std::abs(g[0] - gx) < 1e-6);
      CHECK(std::abs(g[1] - gy) < 1e-6);
    }
    const auto g0 = field_sample(sol, {0, 0}).gradient;
    const auto g1 = field_sample(sol, {1e-7, 0}).gradient;
    CHECK(std::abs(g0[0] - g1[0]) < 1e-6);
    CHECK(std::abs(g0[1] - g1[1]) < 1e-6);
  }

  TEST_CASE("far field against the scattered field at large radius") {
    const auto gap = [](const ModalSolution& sol, const std::vector<double>& dirs, double rho) {
      const auto ff = far_field(sol, dirs);
      double worst = 0;
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        const Vec2 x{rho * std::cos(dirs[i]), rho * std::sin(dirs[i])};
        const cplx v = std::sqrt(rho) * std::exp(-kI * sol.k * rho) * scattered_field(sol, x);
        worst = std::max(worst, std::abs(v - ff.values[i]));
      }
      return worst / ff.max_abs();
    };
    const auto dirs = uniform_directions(32);
    for (double k : {0.5, 1.0, 2.0}) {
      CAPTURE(k);
      const auto sol = mie_solve(single(1.0, 2.0, 0.5), k, Incident::plane(k, 0.3));
      CHECK(gap(sol, dirs, 200.0 / k) < 5e-3);
    }
    // Larger k R: the gap is dominated by the (4n^2 - 1) / (8 k |x|) Hankel correction.
    const auto sol4 = mie_solve(single(1.0, 2.0, 0.5), 4.0, Incident::plane(4.0, 0.3));
    const double g1 = gap(sol4, dirs, 50.0), g2 = gap(sol4, dirs, 100.0), g3 = gap(sol4, dirs, 1000.0);
    CHECK(g1 / g2 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(g3 < 5e-3);
    const auto none = mie_solve(single(1.0, 1.0, 0.0), 2.0, Incident::plane(2.0, 0.0));
    for (cplx v : far_field(none, uniform_directions(16)).values) CHECK(std::abs(v) < 1e-13);
  }

  TEST_CASE("optical theorem for lossless disks") {
    for (const DiskScatterer& s : {single(1.0, 2.0, 0.5), three_layer(), single(0.7, 0.3, -1.5)}) {
      for (double td : {0.0, 1.3}) {
        const double k = 2.0;
        const auto sol = mie_solve(s, k, Incident::plane(k, td));
        const auto ff = far_field(sol, uniform_directions(256));
        const double lhs = ff.l2_norm() * ff.l2_norm();
        const cplx fwd = far_field(sol, {td}).values[0];
        const double rhs = -std::sqrt(8 * kPi / k) * (std::exp(kI * (kPi / 4)) * fwd).real();
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
    }
  }

  TEST_CASE("reciprocity, rotation and truncation") {
    const auto s = three_layer();
    const double k = 1.7;
    const double d1 = 0.4, d2 = 2.1;
    const auto a = mie_solve(s, k, Incident::plane(k, d1));
    const auto b = mie_solve(s, k, Incident::plane(k, d2));
    CHECK(std::abs(far_field(a, {d2 + kPi}).values[0] - far_field(b, {d1 + kPi}).values[0]) < 1e-10);

    const auto dirs = uniform_directions(40);
    const auto fa = far_field(a, dirs);
    std::vector<double> shifted;
    for (double t : dirs) shifted.push_back(t + (d2 - d1));
    const auto fb = far_field(b, shifted);
    for (std::size_t i = 0; i < dirs.size(); ++i) CHECK(std::abs(fa.values[i] - fb.values[i]) < 1e-12);

    const auto more = mie_solve(s, k, Incident::plane(k, d1), a.N + 10);
    CHECK(l2_difference(far_field(more, dirs), fa) < 1e-10);
  }

  TEST_CASE("far-field CSV") {
    FarFieldPattern ff{{0.0, 1.0}, {cplx{1, 2}, cplx{-0.5, 0}}};
    std::ostringstream os;
    write_farfield_csv(os, ff);
    CHECK(os.str() == "theta,re,im\n0,1,2\n1,-0.5,0\n");
  }
}
