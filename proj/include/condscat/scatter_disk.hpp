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

//! \file scatter_disk.hpp
//! Separation-of-variables solution for concentric conductive disks.

#ifndef CONDSCAT_SCATTER_DISK_HPP_
#define CONDSCAT_SCATTER_DISK_HPP_

#include <array>
#include <vector>

#include "condscat/common.hpp"
#include "condscat/wave.hpp"

namespace condscat::disk {

/// Layer j occupies radii[j+1] < r < radii[j] (radii[N] = 0) with index q_values[j];
/// etas[j] acts on the circle r = radii[j].
struct DiskScatterer {
  std::vector<double> radii;
  std::vector<cplx> q_values;
  std::vector<cplx> etas;

  std::size_t layers() const { return radii.size(); }
  void validate() const;
  /// Layer index of radius r, or -1 outside radii[0].
  int layer_of(double r) const;
};

struct ModalSolution {
  DiskScatterer scatterer;
  Incident incident;
  double k = 1.0;
  int N = 0;
  /// Incident and scattered coefficients of J_n(k r) e^{i n theta} and H_n(k r) e^{i n theta},
  /// index n + N.
  std::vector<cplx> c, b;
  /// interior[n + N][j] = (alpha, beta) of alpha J_n(k_j r) + beta Y_n(k_j r) in layer j;
  /// beta = 0 in the innermost layer.
  std::vector<std::vector<std::pair<cplx, cplx>>> interior;
  /// Largest relative residual of the continuity and jump conditions over all modes.
  double max_residual = 0.0;
};

/// ceil(k R_1) + 15.
int default_truncation(const DiskScatterer& s, double k);

/// Throws SolverError naming n and k if a mode's matching matrix is singular.
ModalSolution mie_solve(const DiskScatterer& s, double k, const Incident& incident, int N = -1);

/// Relative residuals of u+ = u- and d_r u- = d_r u+ + eta u+ for mode n at every interface.
std::vector<std::array<double, 2>> transmission_residuals(const ModalSolution& sol, int n);

FarFieldPattern far_field(const ModalSolution& sol, const std::vector<double>& directions);

struct FieldSample {
  cplx value;
  std::array<cplx, 2> gradient;
};

/// Total field and its gradient. A point on an interface is assigned to the outer layer.
FieldSample field_sample(const ModalSolution& sol, const Vec2& x);
std::vector<cplx> field_eval(const ModalSolution& sol, const std::vector<Vec2>& points);
/// Scattered field u - u^i outside radii[0].
cplx scattered_field(const ModalSolution& sol, const Vec2& x);
/// Value and radial derivative at radius r, angle theta, from inside (side = -1) or outside
/// (side = +1) of the layer boundary.
std::pair<cplx, cplx> radial_trace(const ModalSolution& sol, double r, double theta, int side);

}  // namespace condscat::disk

#endif  // CONDSCAT_SCATTER_DISK_HPP_
