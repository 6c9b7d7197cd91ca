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

//! \file experiments.hpp
//! Invisibility scans, far-field differences, admissibility checks and corner regularity
//! probes built on the forward solvers.

#ifndef CONDSCAT_EXPERIMENTS_HPP_
#define CONDSCAT_EXPERIMENTS_HPP_

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "condscat/scatter_fem.hpp"
#include "condscat/scatterer.hpp"
#include "condscat/wave.hpp"
#include "json.hpp"

namespace condscat::experiments {

inline constexpr double kThetaInv = 1e-4;
inline constexpr double kThetaAdm = 1e-3;

struct ForwardOptions {
  enum class Method { Auto, Fem, Modal };
  Method method = Method::Auto;        // Auto: modal series for disks, FEM otherwise
  double points_per_wavelength = 20.0;
  double geometry_fraction = 0.25;     // h never exceeds this fraction of the circumradius
  double rt_factor = 2.0;              // truncation radius over circumradius
  int directions = 128;

  double mesh_size(const Scatterer& s, double k) const;
  nlohmann::json to_json() const;
};

/// Far field on `options.directions` uniform directions. The incident wavenumber is reset to k.
FarFieldPattern far_field(const Scatterer& s, double k, const Incident& incident, const ForwardOptions& options = {});

/// max |u^i| over the scatterer's corners and a circle of its circumradius; 1 for plane waves.
double incident_scale(const Scatterer& s, const Incident& incident);

struct ScanReport {
  std::string parameter = "k";
  std::vector<double> grid;            // ascending
  std::vector<double> norm;            // ||u_inf||_{L2(S^1)}, 0 where the solve failed
  std::vector<double> relative;        // norm / incident_scale
  std::vector<std::string> failure;    // empty when the point solved
  double threshold = kThetaInv;
  nlohmann::json metadata;

  bool failed(std::size_t i) const { return !failure[i].empty(); }
  /// Solved points whose relative norm is below the threshold: candidate near-invisibility.
  std::vector<std::size_t> flagged() const;
  /// Minimum relative norm over solved points; infinity when none solved.
  double min_relative() const;
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

ScanReport invisibility_scan(const Scatterer& s, std::vector<double> k_grid, const Incident& incident,
                             const ForwardOptions& options = {}, double theta_inv = kThetaInv);

double farfield_difference(const Scatterer& s1, const Scatterer& s2, double k, const Incident& incident,
                           const ForwardOptions& options = {});

struct FieldValue {
  cplx u;
  std::array<cplx, 2> grad;
};
using FieldFn = std::function<FieldValue(const Vec2&)>;

FieldFn fem_field(const fem::FemSolution& sol);
FieldFn modal_field(const disk::ModalSolution& sol);
FieldFn incident_field(const Incident& incident);

/// rho0, rho0 r, rho0 r^2, ...
std::vector<double> geometric_radii(double rho0, int count = 4, double ratio = 0.5);

struct AdmissibilityOptions {
  double theta = kThetaAdm;
  /// Opening angle at the vertex; when set, a CondII verdict requires it in (0, pi) minus pi/2.
  std::optional<double> corner_angle;
  bool exclude_right_angle_for_cond_i = false;
  int radial_nodes = 8;
  int angular_nodes = 64;
};

struct Admissibility {
  enum class Verdict { CondI, CondII, Inadmissible };
  Verdict verdict = Verdict::Inadmissible;
  bool d1 = false, d2 = false;          // CondII: which partial derivative averages survive
  double limit_u = 0, limit_d1 = 0, limit_d2 = 0, limit_grad = 0;
  double scale = 0;                     // field scale the threshold is relative to
  bool converged = true;                // extrapolation stable when the largest radius is dropped
  bool angle_filtered = false;          // a condition held but the angle restriction rejected it
  std::vector<double> rho;
  std::vector<double> avg_u, avg_d1, avg_d2, avg_grad;

  /// "CondI", "CondII(d1)", "CondII(d2)", "CondII(d1,d2)" or "Inadmissible".
  std::string describe() const;
  nlohmann::json to_json() const;
};

/// Ball averages of |u|, |d1 u|, |d2 u|, |grad u| extrapolated to rho -> 0. The thresholds
/// compare limit_u / scale and rho_max * limit_grad / scale, with
/// scale = max_j (avg_u(rho_j) + rho_j avg_grad(rho_j)), so verdicts do not change when the
/// field is multiplied by a constant.
Admissibility admissibility_check(const FieldFn& field, const Vec2& vertex, const std::vector<double>& rho_grid,
                                  const AdmissibilityOptions& options = {});

struct RegularityFit {
  double alpha = 0;                    // clamped to (0, 1.5]
  double constant = 0;                 // C in osc ~ C rho^alpha
  double r2 = 0;
  bool degenerate = false;             // no oscillation to fit
  bool unreliable = false;             // r2 < 0.9
  std::vector<double> rho, osc;        // osc = sup_{|x - v| = rho} |u(x) - u(v)|
  nlohmann::json to_json() const;
};

RegularityFit corner_regularity_probe(const FieldFn& field, const Vec2& vertex, const std::vector<double>& rho_grid,
                                      int samples = 64);
/// Probe of the FEM total field at a tagged corner of its mesh, on 8 radii halving from a
/// fifth of the distance to the nearest other corner.
RegularityFit corner_regularity_probe(const fem::FemSolution& sol, const Vec2& vertex);

}  // namespace condscat::experiments

#endif  // CONDSCAT_EXPERIMENTS_HPP_
