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

#include "condscat/cgo.hpp"

#include <algorithm>

#include "condscat/csv.hpp"
#include "condscat/quadrature.hpp"

namespace condscat::cgo {

Vec2 CGOParams::d_perp() const {
  const double c = std::cos(phi), s = std::sin(phi);
  return perp == Perp::Plus ? Vec2{-s, c} : Vec2{s, -c};
}

std::array<cplx, 2> CGOParams::rho() const {
  const Vec2 a = d(), b = d_perp();
  return {-tau * cplx{a.x, b.x}, -tau * cplx{a.y, b.y}};
}

cplx CGOParams::rho_dot_rho() const {
  const auto r = rho();
  return r[0] * r[0] + r[1] * r[1];
}

cplx CGOParams::mu(double theta) const {
  const double arg = perp == Perp::Plus ? theta - phi : phi - theta;
  return tau * cplx{std::cos(arg), std::sin(arg)};
}

DirectionChoice pick_direction(const geometry::Sector& sector) {
  if (!(sector.opening() > 0.0 && sector.opening() < kPi))
    throw DomainError("pick_direction needs an opening angle in (0, pi)");
  DirectionChoice out;
  out.params.phi = 0.5 * (sector.theta_m + sector.theta_M);
  out.varsigma = std::cos(0.5 * sector.opening());
  return out;
}

cplx cgo_phase(const CGOParams& params, const Vec2& x) {
  const auto r = params.rho();
  return std::exp(r[0] * x.x + r[1] * x.y);
}

Moment segment_moment(double s, cplx mu, double zeta) {
  if (!(s >= 0.0)) throw DomainError("moment order must be non-negative");
  if (!(mu.real() > 0.0)) throw DomainError("segment moment requires Re mu > 0");
  if (!(zeta > 0.0)) throw DomainError("segment length must be positive");
  const cplx z = mu * zeta;
  const cplx scale = std::exp(-(s + 1.0) * std::log(mu));
  Moment m;
  m.exact = specfun::lower_incomplete_gamma(s + 1.0, z) * scale;
  m.leading = std::tgamma(s + 1.0) * scale;
  m.tail = -specfun::upper_incomplete_gamma(s + 1.0, z) * scale;
  m.remainder_bound = 2.0 / mu.real() * std::exp(-0.5 * zeta * mu.real());
  return m;
}

bool remainder_bound_applies(double s, double re_mu, double zeta) {
  if (!(re_mu > 0.0)) return false;
  const double r = std::max(zeta, 2.0 * s / re_mu);
  return s * std::log(r) - 0.5 * re_mu * r <= 0.0;
}

CornerIntegral ray_integral(cplx angular, double theta, double r0, const CGOParams& params,
                            int m) {
  const cplx mu = params.mu(theta);
  if (!(mu.real() > 0.0))
    throw DomainError("CGO phase does not decay along the ray at angle " + std::to_string(theta));
  const Moment mo = segment_moment(m, mu, r0);
  return {angular * mo.exact, angular * mo.leading};
}

CornerIntegral boundary_corner_integral(const specfun::FourierBesselField& field,
                                        const geometry::Sector& sector,
                                        const CGOParams& params, int m) {
  sector.validate();
  if (m < 0) throw DomainError("monomial weight must be non-negative");
  CornerIntegral out{};
  for (double t : {sector.theta_m, sector.theta_M}) {
    cplx a{};
    for (int n = 0; n <= field.order(); ++n) {
      const auto& [an, bn] = field.coeffs[n];
      a += an * std::exp(cplx{0.0, n * t}) + bn * std::exp(cplx{0.0, -n * t});
    }
    const auto r = ray_integral(a, t, sector.r0, params, m);
    out.exact += r.exact;
    out.leading += r.leading;
  }
  return out;
}

CornerIntegral sector_area_integral(Monomial monomial, const geometry::Sector& sector,
                                    const CGOParams& params) {
  const double tm = sector.theta_m, tM = sector.theta_M;
  if (tM == tm) return {};
  sector.validate();
  const int s = monomial == Monomial::One ? 1 : 2;
  for (double t : {tm, tM})
    if (!(params.mu(t).real() > 0.0))
      throw DomainError("CGO phase does not decay on the sector boundary");
  const auto weight = [&](double t) -> double {
    switch (monomial) {
      case Monomial::One:
        return 1.0;
      case Monomial::X1:
        return std::cos(t);
      case Monomial::X2:
        return std::sin(t);
    }
    return 0.0;
  };
  const auto f = [&](double t) { return weight(t) * segment_moment(s, params.mu(t), sector.r0).exact; };
  CornerIntegral out;
  out.exact = quad::integrate_adaptive(f, tm, tM, 1e-12).value;

  const bool plus = params.perp == Perp::Plus;
  const double tau = params.tau, phi = params.phi;
  const auto e = [](double a) { return std::exp(cplx{0.0, a}); };
  if (monomial == Monomial::One) {
    // Gamma(2) / tau^2 int e^{-+2i(t - phi)} dt
    const double sg = plus ? -1.0 : 1.0;
    const cplx prim = (e(sg * 2.0 * tM) - e(sg * 2.0 * tm)) / (sg * 2.0 * kI);
    out.leading = e(-sg * 2.0 * phi) * prim / (tau * tau);
  } else {
    // (1/8) [bracket]_{tm}^{tM}: antiderivatives of cos t e^{-+3it} and sin t e^{-+3it}.
    const auto bracket = [&](double t) -> cplx {
      const double c = std::cos(t), sn = std::sin(t);
      if (plus)
        return monomial == Monomial::X1 ? (-sn + 3.0 * kI * c) * e(-3.0 * t)
                                        : (c + 3.0 * kI * sn) * e(-3.0 * t);
      return monomial == Monomial::X1 ? -(sn + 3.0 * kI * c) * e(3.0 * t)
                                      : (c - 3.0 * kI * sn) * e(3.0 * t);
    };
    const cplx ph = plus ? e(3.0 * phi) : e(-3.0 * phi);
    out.leading = std::tgamma(3.0) * ph / (8.0 * tau * tau * tau) * (bracket(tM) - bracket(tm));
  }
  return out;
}

AsymptoticFit fit_decay(const std::vector<double>& tau_grid, const std::vector<cplx>& values) {
  const std::size_t n = tau_grid.size();
  if (n < 5) throw DomainError("fit_decay needs at least 5 grid points");
  if (values.size() != n) throw DomainError("fit_decay: grid and values differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(tau_grid[i] > 0.0)) throw DomainError("fit_decay: tau must be positive");
    if (i && !(tau_grid[i] > tau_grid[i - 1]))
      throw DomainError("fit_decay: tau grid must be strictly increasing");
    if (values[i] == cplx{}) throw DomainError("fit_decay: zero value in sequence");
  }
  double sx = 0, sy = 0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(tau_grid[i]);
    y[i] = std::log(std::abs(values[i]));
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  AsymptoticFit fit;
  const double b = sxy / sxx;
  fit.slope = -b;
  fit.intercept = my - b * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + b * x[i]);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  for (std::size_t i = 1; i < n; ++i)
    if (!(std::abs(values[i]) < std::abs(values[i - 1]))) fit.monotone = false;
  fit.tau_grid = tau_grid;
  return fit;
}

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
  if (!(lo > 0.0 && hi >= lo && ratio > 1.0)) throw DomainError("invalid geometric grid");
  std::vector<double> g;
  for (double t = lo; t <= hi * (1.0 + 1e-12); t *= ratio) g.push_back(t);
  return g;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& sweep) {
  os << "tau,abs_exact,abs_leading,re_exact,im_exact\n";
  for (const auto& p : sweep)
    write_csv_row(os, {p.tau, std::abs(p.exact), std::abs(p.leading), p.exact.real(), p.exact.imag()});
}

}  // namespace condscat::cgo
