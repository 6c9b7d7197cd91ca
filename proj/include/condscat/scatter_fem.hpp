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

//! \file scatter_fem.hpp
//! P1 finite elements for the conductive scattering problem in scattered-field form, with
//! a Fourier Dirichlet-to-Neumann condition on the truncation circle.

#ifndef CONDSCAT_SCATTER_FEM_HPP_
#define CONDSCAT_SCATTER_FEM_HPP_

#include <Eigen/Dense>
#include <memory>

#include "condscat/mesh.hpp"
#include "condscat/scatterer.hpp"
#include "condscat/wave.hpp"

namespace condscat::fem {

struct FemOptions {
  int n_dtn = -1;  // Fourier modes kept in the DtN map; default from ceil(k Rt) + 20 up until dtn_tail <= 1e-10
  double mass_blend = 0.5;  // weight of the row-lumped mass in the k^2 q term, 0 = consistent
};

struct FemSolution {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const MeshLocator> locator;
  Scatterer scatterer;
  Layout layout;
  double k = 1.0;
  Incident incident;
  Eigen::VectorXcd us;        // nodal scattered field
  double residual = 0.0;      // ||A x - b|| / ||b||
  int n_dtn = 0;
  double dtn_tail = 0.0;      // |H_{N+1}(k Rt) / H_{N+1}(k R_s)|, R_s the scatterer radius
  bool dtn_warning = false;   // dtn_tail > 1e-8

  /// Interpolated scattered field; throws DomainError outside the mesh.
  cplx scattered(const Vec2& x) const;
  cplx total(const Vec2& x) const;
  /// Elementwise gradient of the total field in the triangle containing x.
  std::array<cplx, 2> total_gradient(const Vec2& x) const;
  /// Discrete L2 norm of the nodal scattered field over the truncated domain.
  double scattered_l2() const;
};

/// Assembles and factorizes the system; throws SolverError if the factorization fails.
FemSolution solve(std::shared_ptr<const Mesh> mesh, const Scatterer& s, double k,
                  const Incident& incident, const FemOptions& options = {});

/// Far field from samples of u^s on the circle |x| = radius: the normal derivative comes
/// from the exterior Hankel expansion of the samples, then the Helmholtz representation
/// integral is evaluated by the trapezoidal rule.
FarFieldPattern near_to_far(const FemSolution& sol, double radius, const std::vector<double>& directions);

struct FluxJump {
  double error = 0.0;      // || [d_nu u] - eta u ||_{L2(interface)}
  double reference = 0.0;  // || eta u ||_{L2(interface)}
};
/// Compares the elementwise flux jump with eta u on all interface pieces with the tag.
FluxJump flux_jump(const FemSolution& sol, int tag);

}  // namespace condscat::fem

#endif  // CONDSCAT_SCATTER_FEM_HPP_
