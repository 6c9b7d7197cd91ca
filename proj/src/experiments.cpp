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

#include "condscat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "condscat/csv.hpp"
#include "condscat/parallel.hpp"
#include "condscat/quadrature.hpp"
#include "condscat/scatter_disk.hpp"

namespace condscat::experiments {

using nlohmann::json;

namespace {

Incident at_wavenumber(Incident incident, double k) {
  incident.k = k;
  return incident;
}

// Value at 0 of the polynomial through (x_i, y_i).
double neville_at_zero(const std::vector<double>& x, std::vector<double> y) {
  const std::size_t n = x.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i + j < n; ++i) y[i] = (x[i] * y[i + 1] - x[i + j] * y[i]) / (x[i] - x[i + j]);
  return y[0];
}

}  // namespace

double ForwardOptions::mesh_size(const Scatterer& s, double k) const {
  if (!(points_per_wavelength >= 10)) throw DomainError("points_per_wavelength must be at least 10");
  if (!(geometry_fraction > 0)) throw DomainError("geometry_fraction must be positive");
  return std::min({2 * kPi / (k * points_per_wavelength), geometry_fraction * circumradius(s), 0.5});
}

json ForwardOptions::to_json() const {
  const char* m = method == Method::Auto ? "auto" : method == Method::Fem ? "fem" : "modal";
  return {{"method", m},
          {"points_per_wavelength", points_per_wavelength},
          {"geometry_fraction", geometry_fraction},
          {"rt_factor", rt_factor},
          {"directions", directions}};
}

FarFieldPattern far_field(const Scatterer& s, double k, const Incident& incident, const ForwardOptions& options) {
  if (!(k > 0)) throw DomainError("wavenumber must be positive");
  if (options.directions < 8) throw DomainError("need at least 8 far-field directions");
  const Incident inc = at_wavenumber(incident, k);
  const auto dirs = uniform_directions(options.directions);
  const auto* d = std::get_if<disk::DiskScatterer>(&s);
  const bool modal = options.method == ForwardOptions::Method::Modal ||
                     (options.method == ForwardOptions::Method::Auto && d != nullptr);
  if (modal) {
    if (!d) throw DomainError("the modal solver handles disk scatterers only");
    return disk::far_field(disk::mie_solve(*d, k, inc), dirs);
  }
  validate(s);
  if (!(options.rt_factor >= 1.5)) throw DomainError("rt_factor must be at least 1.5");
  const double Rs = circumradius(s);
  const double Rt = options.rt_factor * Rs;
  const auto mesh = std::make_shared<const fem::Mesh>(fem::mesh_scatterer(s, Rt, options.mesh_size(s, k), k));
  const auto sol = fem::solve(mesh, s, k, inc);
  return fem::near_to_far(sol, 0.5 * (Rs + 0.9 * Rt), dirs);
}

double incident_scale(const Scatterer& s, const Incident& incident) {
  double m = 0.0;
  for (const Vec2& c : corners(s)) m = std::max(m, std::abs(incident.value(c)));
  const double R = circumradius(s);
  for (int j = 0; j < 64; ++j) {
    const double t = 2 * kPi * j / 64;
    m = std::max(m, std::abs(incident.value({R * std::cos(t), R * std::sin(t)})));
  }
  return m;
}

std::vector<std::size_t> ScanReport::flagged() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!failed(i) && relative[i] < threshold) out.push_back(i);
  return out;
}

double ScanReport::min_relative() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!failed(i)) m = std::min(m, relative[i]);
  return m;
}

void ScanReport::write_csv(std::ostream& os) const {
  os << parameter << ",norm,relative,status\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_double(grid[i]) << ',' << format_double(norm[i]) << ',' << format_double(relative[i]) << ','
       << (failed(i) ? "failed" : relative[i] < threshold ? "below" : "ok") << '\n';
  }
}

json ScanReport::to_json() const {
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json p{{parameter, grid[i]}, {"norm", norm[i]}, {"relative", relative[i]}};
    if (failed(i)) p["failure"] = failure[i];
    points.push_back(p);
  }
  json flags = json::array();
  for (std::size_t i : flagged()) flags.push_back(grid[i]);
  const double mr = min_relative();
  return {{"metadata", metadata},
          {"threshold", threshold},
          {"points", points},
          {"flagged", flags},
          {"min_relative", std::isfinite(mr) ? json(mr) : json(nullptr)},
          {"note",
           "a norm above the threshold witnesses that the scatterer is not invisible at that k; "
           "a norm below it only marks a candidate and never certifies invisibility"}};
}

ScanReport invisibility_scan(const Scatterer& s, std::vector<double> k_grid, const Incident& incident,
                             const ForwardOptions& options, double theta_inv) {
  validate(s);
  if (k_grid.empty()) throw DomainError("empty wavenumber grid");
  for (double k : k_grid)
    if (!(k > 0) || !std::isfinite(k)) throw DomainError("wavenumbers must be positive and finite");
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());

  ScanReport R;
  R.grid = k_grid;
  R.threshold = theta_inv;
  struct Point {
    double norm = 0, relative = 0;
    std::string failure;
  };
  const auto pts = parallel_map<Point>(k_grid.size(), [&](std::size_t i) {
    Point p;
    const Incident inc = at_wavenumber(incident, k_grid[i]);
    try {
      p.norm = far_field(s, k_grid[i], inc, options).l2_norm();
      p.relative = p.norm / incident_scale(s, inc);
    } catch (const SolverError& e) {
      p.failure = e.what();
    }
    return p;
  });
  for (const auto& p : pts) {
    R.norm.push_back(p.norm);
    R.relative.push_back(p.relative);
    R.failure.push_back(p.failure);
  }
  R.metadata = {{"scatterer", kind_name(s)},
                {"scatterer_hash", hex64(scatterer_hash(s))},
                {"incident", incident.describe()},
                {"forward", options.to_json()}};
  return R;
}

double farfield_difference(const Scatterer& s1, const Scatterer& s2, double k, const Incident& incident,
                           const ForwardOptions& options) {
  const auto a = far_field(s1, k, incident, options);
  const auto b = far_field(s2, k, incident, options);
  return l2_difference(a, b);
}

FieldFn fem_field(const fem::FemSolution& sol) {
  auto keep = std::make_shared<const fem::FemSolution>(sol);
  return [keep](const Vec2& x) { return FieldValue{keep->total(x), keep->total_gradient(x)}; };
}

FieldFn modal_field(const disk::ModalSolution& sol) {
  auto keep = std::make_shared<const disk::ModalSolution>(sol);
  return [keep](const Vec2& x) {
    const auto f = disk::field_sample(*keep, x);
    return FieldValue{f.value, f.gradient};
  };
}

FieldFn incident_field(const Incident& incident) {
  return [incident](const Vec2& x) { return FieldValue{incident.value(x), incident.gradient(x)}; };
}

std::vector<double> geometric_radii(double rho0, int count, double ratio) {
  if (!(rho0 > 0) || count < 1 || !(ratio > 0 && ratio < 1)) throw DomainError("invalid geometric radius grid");
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) r[i] = rho0 * std::pow(ratio, i);
  return r;
}

std::string Admissibility::describe() const {
  switch (verdict) {
    case Verdict::CondI:
      return "CondI";
    case Verdict::CondII:
      return d1 && d2 ? "CondII(d1,d2)" : d1 ? "CondII(d1)" : "CondII(d2)";
    case Verdict::Inadmissible:
      break;
  }
  return "Inadmissible";
}

json Admissibility::to_json() const {
  return {{"verdict", describe()},
          {"limit_u", limit_u},
          {"limit_d1", limit_d1},
          {"limit_d2", limit_d2},
          {"limit_grad", limit_grad},
          {"scale", scale},
          {"converged", converged},
          {"angle_filtered", angle_filtered},
          {"rho", rho},
          {"avg_u", avg_u},
          {"avg_d1", avg_d1},
          {"avg_d2", avg_d2},
          {"avg_grad", avg_grad}};
}

Admissibility admissibility_check(const FieldFn& field, const Vec2& vertex, const std::vector<double>& rho_grid,
                                  const AdmissibilityOptions& options) {
  if (rho_grid.size() < 4) throw DomainError("admissibility needs at least four radii");
  const double ratio = rho_grid[1] / rho_grid[0];
  if (!(rho_grid[0] > 0) || !(ratio < 1))
    throw DomainError("radii must be positive and decreasing");
  for (std::size_t i = 1; i < rho_grid.size(); ++i)
    if (std::abs(rho_grid[i] / rho_grid[i - 1] - ratio) > 1e-9 * ratio)
      throw DomainError("radii must form a geometric sequence");
  if (options.radial_nodes < 2 || options.angular_nodes < 8) throw DomainError("too few quadrature nodes");

  Admissibility A;
  A.rho = rho_grid;
  const auto& gl = quad::gauss_legendre(options.radial_nodes);
  const int M = options.angular_nodes;
  for (double rho : rho_grid) {
    double su = 0, s1 = 0, s2 = 0, sg = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * rho * (gl.nodes[i] + 1);
      const double w = 0.5 * rho * gl.weights[i] * r * (2 * kPi / M);
      for (int j = 0; j < M; ++j) {
        const double t = 2 * kPi * (j + 0.5) / M;
        const FieldValue f = field(vertex + Vec2{r * std::cos(t), r * std::sin(t)});
        su += w * std::abs(f.u);
        s1 += w * std::abs(f.grad[0]);
        s2 += w * std::abs(f.grad[1]);
        sg += w * std::sqrt(std::norm(f.grad[0]) + std::norm(f.grad[1]));
      }
    }
    const double area = kPi * rho * rho;
    A.avg_u.push_back(su / area);
    A.avg_d1.push_back(s1 / area);
    A.avg_d2.push_back(s2 / area);
    A.avg_grad.push_back(sg / area);
  }
  const auto limit = [&](const std::vector<double>& v) { return std::max(0.0, neville_at_zero(rho_grid, v)); };
  A.limit_u = limit(A.avg_u);
  A.limit_d1 = limit(A.avg_d1);
  A.limit_d2 = limit(A.avg_d2);
  A.limit_grad = limit(A.avg_grad);
  for (std::size_t i = 0; i < rho_grid.size(); ++i)
    A.scale = std::max(A.scale, A.avg_u[i] + rho_grid[i] * A.avg_grad[i]);
  if (A.scale == 0.0) return A;

  // Stability: the same extrapolation without the largest radius.
  const std::vector<double> sub(rho_grid.begin() + 1, rho_grid.end());
  const auto drop = [](const std::vector<double>& v) { return std::vector<double>(v.begin() + 1, v.end()); };
  const double rho_max = rho_grid[0];
  const double tol = 0.1 * options.theta * A.scale;
  A.converged = std::abs(std::max(0.0, neville_at_zero(sub, drop(A.avg_u))) - A.limit_u) <= std::max(tol, 0.01 * A.limit_u) &&
                rho_max * std::abs(std::max(0.0, neville_at_zero(sub, drop(A.avg_grad))) - A.limit_grad) <=
                    std::max(tol, 0.01 * rho_max * A.limit_grad);

  const double theta = options.theta * A.scale;
  const bool cond_i = A.limit_u > theta;
  const bool cond_ii = rho_max * A.limit_grad > theta;
  bool angle_ok = true, right = false;
  if (options.corner_angle) {
    const double a = *options.corner_angle;
    right = std::abs(a - kPi / 2) < 1e-12;
    angle_ok = a > 0 && a < kPi && !right;
  }
  if (cond_i) {
    if (options.exclude_right_angle_for_cond_i && right) {
      A.angle_filtered = true;
      return A;
    }
    A.verdict = Admissibility::Verdict::CondI;
  } else if (cond_ii) {
    if (!angle_ok) {
      A.angle_filtered = true;
      return A;
    }
    A.verdict = Admissibility::Verdict::CondII;
    A.d1 = rho_max * A.limit_d1 > theta;
    A.d2 = rho_max * A.limit_d2 > theta;
  }
  return A;
}

json RegularityFit::to_json() const {
  return {{"alpha", alpha}, {"constant", constant}, {"r2", r2}, {"degenerate", degenerate},
          {"unreliable", unreliable}, {"rho", rho}, {"osc", osc}};
}

RegularityFit corner_regularity_probe(const FieldFn& field, const Vec2& vertex, const std::vector<double>& rho_grid,
                                      int samples) {
  if (rho_grid.size() < 3) throw DomainError("regularity probe needs at least three radii");
  if (samples < 8) throw DomainError("too few samples per circle");
  RegularityFit F;
  F.rho = rho_grid;
  const cplx u0 = field(vertex).u;
  for (double rho : rho_grid) {
    if (!(rho > 0)) throw DomainError("radii must be positive");
    double m = 0;
    for (int j = 0; j < samples; ++j) {
      const double t = 2 * kPi * j / samples;
      m = std::max(m, std::abs(field(vertex + Vec2{rho * std::cos(t), rho * std::sin(t)}).u - u0));
    }
    F.osc.push_back(m);
  }
  const double top = *std::max_element(F.osc.begin(), F.osc.end());
  if (!(top > 1e-13 * std::max(1.0, std::abs(u0))) ||
      *std::min_element(F.osc.begin(), F.osc.end()) <= 0.0) {
    F.degenerate = true;
    F.unreliable = true;
    return F;
  }
  // Least squares for log osc = log C + alpha log rho.
  const std::size_t n = rho_grid.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(rho_grid[i]), y = std::log(F.osc[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  const double slope = cxy / cxx;
  F.constant = std::exp((sy - slope * sx) / n);
  F.r2 = cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0;
  F.alpha = std::clamp(slope, 1e-12, 1.5);
  F.unreliable = F.r2 < 0.9;
  return F;
}

RegularityFit corner_regularity_probe(const fem::FemSolution& sol, const Vec2& vertex) {
  const auto& pts = sol.layout.grading_points;
  double nearest = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const Vec2& p : pts) {
    const double d = dist(p, vertex);
    if (d < 1e-12) found = true;
    else nearest = std::min(nearest, d);
  }
  if (!found) throw DomainError("point is not a tagged corner of the mesh");
  if (!std::isfinite(nearest)) nearest = sol.layout.radius;
  return corner_regularity_probe(fem_field(sol), vertex, geometric_radii(nearest / 5, 8, 0.5));
}

}  // namespace condscat::experiments
