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

//! \file specfun.hpp
//! Integer-order cylinder functions of complex argument, incomplete Gamma, and
//! truncated Fourier-Bessel expansions v = sum_n (a_n e^{in t} + b_n e^{-in t}) J_n(kappa r).

#ifndef CONDSCAT_SPECFUN_HPP_
#define CONDSCAT_SPECFUN_HPP_

#include <utility>
#include <vector>

#include "condscat/common.hpp"

namespace condscat::specfun {

enum class BesselKind { J, Y, H1 };

/// Single value of J_n, Y_n or H^(1)_n at complex z. Y and H1 are singular at z = 0.
cplx cyl_bessel(BesselKind kind, int n, cplx z);

/// J_0..J_nmax. Ascending series for small |z|, Miller backward recurrence otherwise.
std::vector<cplx> bessel_j_seq(int nmax, cplx z);

struct CylinderSeq {
  std::vector<cplx> J;
  std::vector<cplx> Y;
  std::vector<cplx> H;  // H^(1) = J + iY, computed without cancellation when it is small
};
/// J, Y and H^(1) for orders 0..nmax. Throws OverflowError if Y leaves the double range.
CylinderSeq bessel_jy_seq(int nmax, cplx z);
/// H^(1)_0..H^(1)_nmax.
std::vector<cplx> hankel1_seq(int nmax, cplx z);

/// Derivatives of a sequence f_0..f_nmax of any cylinder function family:
/// f_n' = f_{n-1} - (n/z) f_n, f_0' = -f_1. The last entry needs f_{nmax+1}, so the
/// returned vector has one entry less than the input.
std::vector<cplx> cyl_derivatives(const std::vector<cplx>& f, cplx z);

/// gamma(s, z) = int_0^z t^{s-1} e^{-t} dt.
cplx lower_incomplete_gamma(double s, cplx z);
/// Gamma(s, z) = Gamma(s) - gamma(s, z).
cplx upper_incomplete_gamma(double s, cplx z);

struct FourierBesselField {
  double kappa = 1.0;
  /// (a_n, b_n) for n = 0..N.
  std::vector<std::pair<cplx, cplx>> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Jacobi-Anger coefficients of exp(i kappa x.d), d = (cos theta_d, sin theta_d).
  static FourierBesselField plane_wave(double kappa, double theta_d, int n_trunc);
};

struct FbValue {
  cplx value;
  /// Bound on the omitted terms n > N, assuming |a_n| + |b_n| stays below the largest
  /// stored coefficient pair.
  double tail_bound = 0.0;
};

FbValue fb_eval(const FourierBesselField& field, double r, double theta);

/// Default truncation ceil(kappa r_c) + 15, lowered while |J_N(kappa r_c)| < 1e-8.
int fb_default_order(double kappa, double r_c);

/// Fits coefficients to values sampled at theta_j = 2 pi j / M on the circle r = r_c.
/// n_trunc < 0 selects fb_default_order. Uses the convention b_0 = 0.
FourierBesselField fb_fit(const std::vector<cplx>& samples, double r_c, double kappa,
                          int n_trunc = -1);

}  // namespace condscat::specfun

#endif  // CONDSCAT_SPECFUN_HPP_
