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

//! \file ucp.hpp
//! Determinant conditions behind the corner unique-continuation argument: the recursive
//! 2x2 step systems, the gradient systems M1/M2 and the parameter-recovery system, both as
//! closed forms and as matrices assembled from CGO corner integrals.

#ifndef CONDSCAT_UCP_HPP_
#define CONDSCAT_UCP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condscat/cgo.hpp"
#include "condscat/geometry.hpp"
#include "condscat/specfun.hpp"
#include "json.hpp"

namespace condscat::ucp {

/// 2 (cos beta - cos((2 ell + 3) beta)).
double det_step(double beta, int ell);

/// Step matrix with rows from the two perpendicular choices, phi-free:
/// [[e^{-i tm} + e^{-i tM}, e^{-K i tm} + e^{-K i tM}], [e^{K i tm} + e^{K i tM}, e^{i tm} + e^{i tM}]],
/// K = 2 ell + 3.
Eigen::Matrix2cd step_matrix(double theta_m, double theta_M, int ell);

/// Zeros of det_step(., ell) in (0, pi): {a pi/(ell+1), a = 1..ell} and {s pi/(ell+2), s = 1..ell+1}.
std::vector<double> step_zero_set(int ell);

struct Witness {
  int numerator = 0;
  int denominator = 0;  // ell + 1 or ell + 2
  std::string describe() const;
};
/// The enumerated zero of det_step(., ell) within tol of beta, if any.
std::optional<Witness> rational_witness(double beta, int ell, double tol = 1e-9);

struct GradientDet {
  double detM1 = 0.0;
  double detM2 = 0.0;
};
/// (-2 sin^2 beta cos beta, 2 sin^2 beta cos beta).
GradientDet det_gradient(double beta);
Eigen::Matrix2d gradient_matrix_m1(double theta_m, double theta_M);
Eigen::Matrix2d gradient_matrix_m2(double theta_m, double theta_M);

/// Determinant of the parameter-recovery matrix, 8 (cos 2 beta - 1)^2 i = 32 i sin^4 beta.
cplx det_param_recovery(double beta);
/// Rows: bracketed angular antiderivatives for the plus and minus perpendicular choices.
Eigen::Matrix2cd param_recovery_matrix(double theta_m, double theta_M);
/// 20 sin 3b sin b + 12 cos 3b cos b - 12, which equals -8 (cos 2b - 1)^2.
double param_recovery_identity(double beta);

struct StepSystem {
  int ell = 0;
  double beta = 0.0;
  double phi = 0.0;
  /// Row-normalized leading coefficients; equals step_matrix(theta_m, theta_M, ell).
  Eigen::Matrix2cd matrix;
  /// tau^{ell+2}-scaled leading coefficients before normalization.
  Eigen::Matrix2cd raw;
  /// raw.row(r) = scale[r] * matrix.row(r).
  Eigen::Vector2cd row_scale;
  /// Normalized right-hand side terms at this tau (zero without a trial field).
  Eigen::Vector2cd rhs;
  /// Normalized left-hand side at this tau (zero without a trial field).
  Eigen::Vector2cd lhs;

  double det() const { return std::abs(matrix.determinant()); }
  bool singular(double tol = 1e-9) const { return det() < tol; }
};

/// Builds the step-(ell+1) system at amplitude tau. phi defaults to the sector bisector.
/// With a trial field, lhs holds the order-(ell+1) boundary term and rhs the higher Bessel
/// terms of the same identity, both under the induction hypothesis a_j = b_j = 0, j <= ell.
StepSystem assemble_step_system(const geometry::Sector& sector, cplx eta, int ell, double tau,
                                double gamma1,
                                const specfun::FourierBesselField* trial = nullptr,
                                std::optional<double> phi = std::nullopt);

/// Extrapolates f(tau) = f_inf + c1/tau + c2/tau^2 + ... from samples on a geometric grid.
cplx richardson_limit(const std::vector<double>& tau, const std::vector<cplx>& values,
                      int levels = 3);

struct StepReport {
  int ell = 0;
  double det_numeric = 0.0;
  double det_closed = 0.0;
  double condition = 0.0;
  bool singular = false;
  std::optional<Witness> witness;
  bool hypothesis_holds = true;
  Eigen::Vector2cd rhs_limit = Eigen::Vector2cd::Zero();
  Eigen::Vector2cd forced = Eigen::Vector2cd::Zero();
  double residual = 0.0;
  double tolerance = 0.0;
  bool forced_zero = false;
  Eigen::Vector2cd lhs_limit = Eigen::Vector2cd::Zero();
  /// B^{-1} lhs_limit: the injected (a_{ell+1}, b_{ell+1}) seen through the identity.
  Eigen::Vector2cd recovered = Eigen::Vector2cd::Zero();
  std::optional<double> lhs_slope;
  std::optional<double> rhs_slope;
  std::optional<double> mismatch_slope;
};

struct UcpReport {
  double beta = 0.0;
  geometry::AngleClass angle;
  std::vector<double> tau_grid;
  std::vector<StepReport> steps;
  int first_singular = -1;

  bool all_nonsingular() const { return first_singular < 0; }
  nlohmann::json to_json() const;
};

struct UcpOptions {
  int max_step = 10;
  std::int64_t angle_bound = 10000;
  double singular_tol = 1e-9;
};

/// Runs steps ell = 0..max_step. Singular steps are reported with their rational witness
/// and skip the forced solve. Coefficients multiply J_n(sqrt(gamma1) r); coeffs.kappa is unused.
/// The grid should satisfy tau r0 cos(beta/2) >> max_step for clean slopes.
UcpReport ucp_verify(const geometry::Sector& sector, cplx eta, double gamma1,
                     const specfun::FourierBesselField& coeffs,
                     const std::vector<double>& tau_grid, const UcpOptions& options = {});

}  // namespace condscat::ucp

#endif  // CONDSCAT_UCP_HPP_
