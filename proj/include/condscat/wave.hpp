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

//! \file wave.hpp
//! Incident waves and far-field patterns shared by the disk and FEM solvers.

#ifndef CONDSCAT_WAVE_HPP_
#define CONDSCAT_WAVE_HPP_

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "condscat/common.hpp"

namespace condscat {

struct Incident {
  enum class Kind { Plane, Herglotz, PointSource };
  Kind kind = Kind::Plane;
  double k = 1.0;
  double theta_d = 0.0;        // Plane: direction angle
  std::vector<cplx> kernel;    // Herglotz: g at xi_j = 2 pi j / M
  Vec2 z0{0.0, 0.0};           // PointSource: H_0^(1)(k |x - z0|)

  static Incident plane(double k, double theta_d);
  static Incident herglotz(double k, std::vector<cplx> kernel);
  static Incident point_source(double k, Vec2 z0);

  void validate() const;
  cplx value(const Vec2& x) const;
  std::array<cplx, 2> gradient(const Vec2& x) const;
  /// Coefficients c_n, n = -N..N (index n + N), of sum_n c_n J_n(k r) e^{i n theta}, valid
  /// for |x| < |z0| in the point-source case. Herglotz needs at least 2N + 1 kernel samples.
  std::vector<cplx> modal(int N) const;
  std::string describe() const;
};

struct FarFieldPattern {
  std::vector<double> theta;
  std::vector<cplx> values;

  /// Trapezoidal L2(S^1) norm; theta must be the uniform grid 2 pi j / M.
  double l2_norm() const;
  double max_abs() const;
};

std::vector<double> uniform_directions(int M);

/// Relative L2 distance ||a - b|| / ||b|| on a shared uniform grid.
double relative_l2(const FarFieldPattern& a, const FarFieldPattern& b);
/// ||a - b|| on a shared uniform grid.
double l2_difference(const FarFieldPattern& a, const FarFieldPattern& b);

/// Rows theta,re,im.
void write_farfield_csv(std::ostream& os, const FarFieldPattern& ff);

}  // namespace condscat

#endif  // CONDSCAT_WAVE_HPP_
