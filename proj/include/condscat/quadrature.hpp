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

#ifndef CONDSCAT_QUADRATURE_HPP_
#define CONDSCAT_QUADRATURE_HPP_

#include <array>
#include <functional>
#include <vector>

#include "condscat/common.hpp"

namespace condscat::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
const Rule& gauss_legendre(int n);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points each.
cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int order,
                  int panels = 1);

struct AdaptiveResult {
  cplx value;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Globally adaptive Gauss-Kronrod (7/15). Stops when the summed error estimate is below
/// tol * |value| or at the rounding floor, or after `max_intervals` panels.
AdaptiveResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                  double tol = 1e-12, int max_intervals = 2000);

/// Symmetric triangle rule: barycentric points and weights summing to 1.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
};

/// Degree-5, 7-point rule (Radon).
const TriangleRule& triangle_rule7();

}  // namespace condscat::quad

#endif  // CONDSCAT_QUADRATURE_HPP_
