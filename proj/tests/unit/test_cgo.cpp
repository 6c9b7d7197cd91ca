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

#include <random>
#include <sstream>

#include "condscat/cgo.hpp"
#include "condscat/quadrature.hpp"
#include "doctest.h"

using namespace condscat;
using namespace condscat::cgo;
using geometry::Sector;

namespace {

// Independent oracle: composite Gauss-Legendre along the ray after r = t^2.
cplx ray_quadrature(double s, cplx mu, double zeta) {
  const auto f = [&](double t) { return 2.0 * std::pow(t, 2.0 * s + 1.0) * std::exp(-mu * t * t); };
  return quad::integrate_gl(f, 0.0, std::sqrt(zeta), 16, 64);
}

}  // namespace

TEST_SUITE("cgo") {

TEST_CASE("rho.rho vanishes") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi), lt(0.0, 9.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    CGOParams p{ang(rng), i % 2 ? Perp::Plus : Perp::Minus, std::exp(lt(rng))};
    worst = std::max(worst, std::abs(p.rho_dot_rho()) / (p.tau * p.tau));
    CHECK(std::abs(dot(p.d(), p.d_perp())) < 1e-15);
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("pick_direction") {
  auto a = pick_direction(Sector{0.0, kPi / 2, 1.0});
  CHECK(a.params.phi == doctest::Approx(kPi / 4));
  CHECK(a.varsigma == doctest::Approx(0.70710678118654752));
  auto b = pick_direction(Sector{-0.3, 0.3, 1.0});
  CHECK(b.params.phi == doctest::Approx(0.0));
  CHECK(b.varsigma == doctest::Approx(0.955336489125606));
  auto c = pick_direction(Sector{-1.57, 1.57, 1.0});
  CHECK(c.varsigma < 1e-3);
  CHECK_THROWS_AS(pick_direction(Sector{-1.6, 1.6, 1.0}), DomainError);

  const Sector s{-0.4, 0.7, 1.0};
  const auto dc = pick_direction(s);
  for (int i = 0; i <= 200; ++i) {
    const double t = s.theta_m + s.opening() * i / 200.0;
    CHECK(dot(dc.params.d(), Vec2{std::cos(t), std::sin(t)}) >= dc.varsigma - 1e-15);
  }
}

TEST_CASE("cgo_phase") {
  CGOParams p{0.3, Perp::Plus, 17.0};
  CHECK(cgo_phase(p, {0.0, 0.0}) == cplx{1.0, 0.0});
  const Sector s{-0.2, 0.9, 0.5};
  auto dc = pick_direction(s);
  dc.params.tau = 40.0;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double r = 0.5 * u(rng), t = s.theta_m + s.opening() * u(rng);
    const Vec2 x{r * std::cos(t), r * std::sin(t)};
    for (Perp pp : {Perp::Plus, Perp::Minus}) {
      dc.params.perp = pp;
      const double mag = std::abs(cgo_phase(dc.params, x));
      CHECK(mag == doctest::Approx(std::exp(-40.0 * dot(dc.params.d(), x))).epsilon(1e-12));
      CHECK(mag <= std::exp(-40.0 * dc.varsigma * r) * (1.0 + 1e-12));
      CHECK(std::abs(cgo_phase(dc.params, x) - std::exp(-dc.params.mu(t) * r)) < 1e-13);
    }
  }
}

TEST_CASE("segment_moment examples") {
  auto a = segment_moment(0.0, 2.0, 1.0);
  CHECK(std::abs(a.exact - (1.0 - std::exp(-2.0)) / 2.0) < 1e-15);
  auto b = segment_moment(1.0, 10.0, 1.0);
  CHECK(std::abs(b.exact - (1.0 - 11.0 * std::exp(-10.0)) / 100.0) < 1e-16);
  const auto q = quad::integrate_adaptive([](double r) { return cplx{r * std::exp(-10.0 * r)}; }, 0.0, 1.0, 1e-14);
  CHECK(std::abs(b.exact - q.value) < 1e-15);
  auto c = segment_moment(1.0, 200.0, 1.0);
  CHECK(std::abs(c.exact - 2.5e-5) < 1e-18);
  CHECK(std::abs(c.tail) / std::abs(c.leading) < 1e-40);
  CHECK(std::abs(c.tail) > 0.0);
  CHECK_THROWS_AS(segment_moment(1.0, cplx{0.0, 3.0}, 1.0), DomainError);
  CHECK_THROWS_AS(segment_moment(1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("segment_moment against composite Gauss-Legendre") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double s = 0.5 * (i % 7);
    const cplx mu{1.0 + 99.0 * u(rng), 100.0 * (2.0 * u(rng) - 1.0)};
    const double zeta = 0.1 + 1.9 * u(rng);
    const auto m = segment_moment(s, mu, zeta);
    const cplx ref = ray_quadrature(s, mu, zeta);
    worst = std::max(worst, std::abs(m.exact - ref) / std::abs(ref));
    CHECK(std::abs(m.exact - m.leading - m.tail) <= 1e-13 * std::max(std::abs(m.leading), std::abs(m.tail)));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("remainder bound holds in the asymptotic regime") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double s = 3.0 * u(rng);
    const double re = 10.0 + 190.0 * u(rng);
    const cplx mu{re, re * 3.0 * (2.0 * u(rng) - 1.0)};
    const double zeta = 0.1 + 1.9 * u(rng);
    REQUIRE(remainder_bound_applies(s, re, zeta));
    const auto m = segment_moment(s, mu, zeta);
    if (!(std::abs(m.exact - m.leading) <= m.remainder_bound)) ++violations;
    if (!(std::abs(m.tail) <= m.remainder_bound)) ++violations;
  }
  CHECK(violations == 0);
  // Outside the regime the literal inequality can fail.
  CHECK_FALSE(remainder_bound_applies(3.0, 1.0, 0.1));
  const auto m = segment_moment(3.0, 1.0, 0.1);
  CHECK(std::abs(m.tail) > m.remainder_bound);
}

TEST_CASE("boundary_corner_integral") {
  const Sector s{-0.4, 0.7, 1.0};
  auto p = pick_direction(s).params;
  p.perp = Perp::Minus;
  p.tau = 100.0;
  specfun::FourierBesselField zero;
  zero.coeffs = {{0.0, 0.0}, {0.0, 0.0}};
  const auto z = boundary_corner_integral(zero, s, p, 1);
  CHECK(z.exact == cplx{});
  CHECK(z.leading == cplx{});

  specfun::FourierBesselField f;
  f.coeffs = {{0.0, 0.0}, {1.0, 0.0}};
  const auto v = boundary_corner_integral(f, s, p, 1);
  CHECK(std::abs(v.exact - v.leading) / std::abs(v.leading) <= 1.0 / p.tau);
  // Per-ray oracle by quadrature.
  cplx ref{};
  for (double t : {s.theta_m, s.theta_M}) ref += std::exp(cplx{0.0, t}) * ray_quadrature(1.0, p.mu(t), s.r0);
  CHECK(std::abs(v.exact - ref) < 1e-12 * std::abs(ref));
  // Closed-form leading term for perp plus: sum (a1 e^{it} + b1 e^{-it}) Gamma(2) / (tau^2 e^{2i(t - phi)}).
  auto pp = p;
  pp.perp = Perp::Plus;
  const auto w = boundary_corner_integral(f, s, pp, 1);
  cplx lead{};
  for (double t : {s.theta_m, s.theta_M})
    lead += std::exp(cplx{0.0, t}) / (pp.tau * pp.tau * std::exp(cplx{0.0, 2.0 * (t - pp.phi)}));
  CHECK(std::abs(w.leading - lead) < 1e-14 * std::abs(lead));
}

TEST_CASE("boundary_corner_integral decay slopes") {
  const Sector s{-0.4, 0.7, 1.0};
  auto p = pick_direction(s).params;
  specfun::FourierBesselField f;
  f.coeffs = {{0.2, 0.0}, {1.0, 0.3}, {0.5, -0.7}, {0.1, 0.2}};
  const auto grid = geometric_grid(16.0, 4096.0);
  REQUIRE(grid.size() == 9);
  for (Perp perp : {Perp::Plus, Perp::Minus})
    for (int m = 0; m <= 4; ++m) {
      p.perp = perp;
      const auto sweep = tau_sweep(grid, [&](double tau) {
        auto q = p;
        q.tau = tau;
        return boundary_corner_integral(f, s, q, m);
      });
      std::vector<cplx> vals;
      for (const auto& pt : sweep) vals.push_back(pt.exact);
      const auto fit = fit_decay(grid, vals);
      CHECK(std::abs(fit.slope - (m + 1)) < 0.02);
      CHECK(fit.r_squared > 0.999);
    }
}

TEST_CASE("plus and minus rows are conjugate for real coefficients") {
  const Sector s{0.1, 1.3, 0.8};
  auto p = pick_direction(s).params;
  p.tau = 30.0;
  specfun::FourierBesselField ab, ba, same;
  ab.coeffs = {{0.0, 0.0}, {1.0, 0.4}, {-0.3, 0.8}};
  ba.coeffs = {{0.0, 0.0}, {0.4, 1.0}, {0.8, -0.3}};
  same.coeffs = {{0.5, 0.0}, {1.0, 1.0}, {0.2, 0.2}};
  auto plus = p, minus = p;
  minus.perp = Perp::Minus;
  for (int m : {1, 2}) {
    const auto a = boundary_corner_integral(ab, s, plus, m);
    const auto b = boundary_corner_integral(ba, s, minus, m);
    CHECK(std::abs(std::conj(a.exact) - b.exact) < 1e-14 * std::abs(a.exact));
    const auto c = boundary_corner_integral(same, s, plus, m);
    const auto d = boundary_corner_integral(same, s, minus, m);
    CHECK(std::abs(std::conj(c.exact) - d.exact) < 1e-14 * std::abs(c.exact));
  }
}

TEST_CASE("boundary_corner_integral rejects non-decaying rays") {
  const Sector s{-0.4, 0.7, 1.0};
  CGOParams p{2.5, Perp::Plus, 10.0};
  specfun::FourierBesselField f;
  f.coeffs = {{1.0, 0.0}};
  CHECK_THROWS_AS(boundary_corner_integral(f, s, p, 1), DomainError);
}

TEST_CASE("sector_area_integral") {
  const Sector deg{0.5, 0.5, 1.0};
  CGOParams p{0.5, Perp::Plus, 10.0};
  const auto d = sector_area_integral(Monomial::X1, deg, p);
  CHECK(d.exact == cplx{});
  CHECK(d.leading == cplx{});

  const Sector s{0.0, 1.0, 1.0};
  auto q = pick_direction(s).params;
  q.tau = 50.0;
  const auto v = sector_area_integral(Monomial::X1, s, q);
  const auto br = [](double t) { return (-std::sin(t) + 3.0 * kI * std::cos(t)) * std::exp(cplx{0.0, -3.0 * t}); };
  const cplx expected = (br(1.0) - br(0.0)) / 8.0 * 2.0 * std::exp(cplx{0.0, 3.0 * q.phi}) / std::pow(q.tau, 3);
  CHECK(std::abs(v.leading - expected) < 1e-15 * std::abs(expected));
  CHECK(std::abs(v.exact - v.leading) < 1e-10 * std::abs(v.leading));
}

TEST_CASE("sector_area_integral against a two-dimensional quadrature oracle") {
  const Sector s{-0.3, 0.9, 0.7};
  auto p = pick_direction(s).params;
  for (Perp perp : {Perp::Plus, Perp::Minus})
    for (double tau : {3.0, 25.0})
      for (Monomial mono : {Monomial::One, Monomial::X1, Monomial::X2}) {
        p.perp = perp;
        p.tau = tau;
        const auto v = sector_area_integral(mono, s, p);
        const auto inner = [&](double t) {
          const auto g = [&](double r) {
            const Vec2 x{r * std::cos(t), r * std::sin(t)};
            const double w = mono == Monomial::One ? 1.0 : (mono == Monomial::X1 ? x.x : x.y);
            return w * cgo_phase(p, x) * r;
          };
          return quad::integrate_gl(g, 0.0, s.r0, 20, 16);
        };
        const cplx ref = quad::integrate_gl(inner, s.theta_m, s.theta_M, 20, 8);
        CHECK(std::abs(v.exact - ref) < 1e-11 * std::abs(ref));
        // Exact leading-order angular integral, also by quadrature.
        const int pw = mono == Monomial::One ? 2 : 3;
        const auto lf = [&](double t) {
          const double w = mono == Monomial::One ? 1.0 : (mono == Monomial::X1 ? std::cos(t) : std::sin(t));
          return w * std::tgamma(pw) / std::pow(p.mu(t), pw);
        };
        const cplx lref = quad::integrate_gl(lf, s.theta_m, s.theta_M, 20, 4);
        CHECK(std::abs(v.leading - lref) < 1e-13 * std::abs(lref));
      }
}

TEST_CASE("sector_area_integral decay slopes") {
  const Sector s{0.0, 1.0, 1.0};
  auto p = pick_direction(s).params;
  const auto grid = geometric_grid(16.0, 4096.0);
  for (auto [mono, expect] : {std::pair{Monomial::One, 2.0}, std::pair{Monomial::X1, 3.0}, std::pair{Monomial::X2, 3.0}}) {
    std::vector<cplx> vals;
    for (double tau : grid) {
      p.tau = tau;
      vals.push_back(sector_area_integral(mono, s, p).exact);
    }
    CHECK(std::abs(fit_decay(grid, vals).slope - expect) < 0.02);
  }
}

TEST_CASE("fit_decay") {
  const auto grid = geometric_grid(16.0, 4096.0);
  std::vector<cplx> a, b, bm, c;
  for (double t : grid) {
    a.push_back(std::pow(t, -2.0));
    b.push_back(std::pow(t, -2.0) * (1.0 + 0.5 / t));
    bm.push_back(std::pow(t, -2.0) * (1.0 - 0.5 / t));
    c.push_back(segment_moment(1.0, t, 1.0).exact);
  }
  const auto fa = fit_decay(grid, a);
  CHECK(fa.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fa.r_squared == doctest::Approx(1.0));
  CHECK(fa.monotone);
  // A positive correction steepens the decay, a negative one flattens it.
  const auto fb = fit_decay(grid, b);
  CHECK(fb.slope >= 2.0);
  CHECK(fb.slope <= 2.03);
  const auto fbm = fit_decay(grid, bm);
  CHECK(fbm.slope >= 1.97);
  CHECK(fbm.slope <= 2.0);
  CHECK(std::abs(fit_decay(grid, c).slope - 2.0) < 0.01);

  CHECK_THROWS_AS(fit_decay({1, 2, 3, 4}, {1.0, 1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fit_decay({1, 2, 3, 4, 5}, {1.0, 1.0, 0.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fit_decay({1, 2, 2, 4, 5}, {1.0, 1.0, 1.0, 1.0, 1.0}), DomainError);
  const auto wobble = fit_decay({1, 2, 4, 8, 16}, {1.0, 0.1, 1.0, 0.1, 1.0});
  CHECK_FALSE(wobble.monotone);
  CHECK(wobble.r_squared < 0.5);
}

TEST_CASE("sweep CSV is deterministic") {
  const Sector s{-0.4, 0.7, 1.0};
  auto p = pick_direction(s).params;
  specfun::FourierBesselField f;
  f.coeffs = {{0.0, 0.0}, {1.0, 0.0}};
  const auto grid = geometric_grid(16.0, 256.0);
  const auto run = [&] {
    std::ostringstream os;
    write_sweep_csv(os, tau_sweep(grid, [&](double tau) {
      auto q = p;
      q.tau = tau;
      return boundary_corner_integral(f, s, q, 1);
    }));
    return os.str();
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("tau,abs_exact,abs_leading", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 6);
}

}  // TEST_SUITE
