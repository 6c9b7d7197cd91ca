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

//! \file cgo.hpp
//! Complex geometrical optics phases e^{rho.x}, rho = -tau (d + i d_perp), and the corner
//! moment integrals they produce, with exact values and leading-order asymptotics.
//!
//! On the ray x = r (cos t, sin t) the phase is rho.x = -mu(t) r with
//! mu(t) = tau e^{i(t - phi)} for Perp::Plus and tau e^{i(phi - t)} for Perp::Minus.

#ifndef CONDSCAT_CGO_HPP_
#define CONDSCAT_CGO_HPP_

#include <array>
#include <ostream>
#include <vector>

#include "condscat/common.hpp"
#include "condscat/geometry.hpp"
#include "condscat/specfun.hpp"

namespace condscat::cgo {

/// Plus: d_perp = (-sin phi, cos phi). Minus: d_perp = (sin phi, -cos phi).
enum class Perp { Plus, Minus };

struct CGOParams {
  double phi = 0.0;
  Perp perp = Perp::Plus;
  double tau = 1.0;

  Vec2 d() const { return {std::cos(phi), std::sin(phi)}; }
  Vec2 d_perp() const;
  std::array<cplx, 2> rho() const;
  cplx rho_dot_rho() const;
  /// mu(t) with rho.x = -mu(t) |x| on the ray at angle t.
  cplx mu(double theta) const;
};

struct DirectionChoice {
  CGOParams params;  // phi set to the bisector; perp and tau left at their defaults
  double varsigma = 0.0;
};

/// d along the sector bisector and varsigma = cos(beta / 2) <= d.x_hat on the sector.
DirectionChoice pick_direction(const geometry::Sector& sector);

/// e^{rho.x}.
cplx cgo_phase(const CGOParams& params, const Vec2& x);

struct Moment {
  cplx exact;             // int_0^zeta r^s e^{-mu r} dr
  cplx leading;           // Gamma(s+1) / mu^{s+1}
  cplx tail;              // exact - leading = -Gamma(s+1, mu zeta) / mu^{s+1}
  double remainder_bound = 0.0;  // (2 / Re mu) e^{-zeta Re mu / 2}
};

Moment segment_moment(double s, cplx mu, double zeta);

/// True when sup_{r >= zeta} r^s e^{-r Re mu / 2} <= 1, which makes |tail| <= remainder_bound
/// a strict inequality rather than an asymptotic statement.
bool remainder_bound_applies(double s, double re_mu, double zeta);

struct CornerIntegral {
  cplx exact;
  cplx leading;
};

/// Sum over the two boundary rays t in {theta_m, theta_M}, r in (0, r0), of
/// A(t) int r^m e^{rho.x} dr with A(t) = sum_n a_n e^{int} + b_n e^{-int}.
/// The leading part replaces each radial moment by Gamma(m+1) / mu(t)^{m+1}.
CornerIntegral boundary_corner_integral(const specfun::FourierBesselField& field,
                                        const geometry::Sector& sector,
                                        const CGOParams& params, int m);

/// Contribution of a single ray, used by the step-system assembly.
CornerIntegral ray_integral(cplx angular, double theta, double r0, const CGOParams& params,
                            int m);

enum class Monomial { One, X1, X2 };

/// int over the sector of monomial(x) e^{rho.x} dx: radial moments in closed form,
/// adaptive Gauss-Kronrod in the angle.
CornerIntegral sector_area_integral(Monomial monomial, const geometry::Sector& sector,
                                    const CGOParams& params);

struct AsymptoticFit {
  double slope = 0.0;      // p in |value| ~ C tau^{-p}
  double intercept = 0.0;  // log C
  double r_squared = 0.0;
  bool monotone = true;    // |values| strictly decreasing along the grid
  std::vector<double> tau_grid;
};

/// Least squares fit of log|value| against log tau.
AsymptoticFit fit_decay(const std::vector<double>& tau_grid, const std::vector<cplx>& values);

/// lo, lo*ratio, ... up to and including hi (within rounding).
std::vector<double> geometric_grid(double lo, double hi, double ratio = 2.0);

struct SweepPoint {
  double tau = 0.0;
  cplx exact;
  cplx leading;
};

/// Evaluates `fn(tau)` on the grid, one independent task per point, ordered by tau.
template <class Fn>
std::vector<SweepPoint> tau_sweep(const std::vector<double>& grid, Fn fn);

/// CSV with header tau,abs_exact,abs_leading,re_exact,im_exact.
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& sweep);

}  // namespace condscat::cgo

#include "condscat/parallel.hpp"

namespace condscat::cgo {

template <class Fn>
std::vector<SweepPoint> tau_sweep(const std::vector<double>& grid, Fn fn) {
  return parallel_map<SweepPoint>(grid.size(), [&](std::size_t i) {
    const CornerIntegral c = fn(grid[i]);
    return SweepPoint{grid[i], c.exact, c.leading};
  });
}

}  // namespace condscat::cgo

#endif  // CONDSCAT_CGO_HPP_
