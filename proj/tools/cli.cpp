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

#include "cli.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "condscat/cgo.hpp"
#include "condscat/csv.hpp"
#include "condscat/experiments.hpp"
#include "condscat/parallel.hpp"
#include "condscat/quadrature.hpp"
#include "condscat/scatter_disk.hpp"
#include "condscat/scatter_fem.hpp"
#include "condscat/scatterer.hpp"
#include "condscat/ucp.hpp"

#ifndef CONDSCAT_VERSION
#define CONDSCAT_VERSION "0.0.0"
#endif

namespace condscat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Typed access to one config object. Every read is recorded with its resolved value so the
// manifest shows the defaults that were applied; unread keys are rejected by finish().
class Params {
 public:
  Params(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key, bool optional) {
    used_.insert(key);
    if (j_.contains(key)) return &j_.at(key);
    if (!optional) throw ConfigError(path(key) + ": missing");
    return nullptr;
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const json* v = raw(key, def.has_value());
    if (!v) return record(key, *def);
    if (!v->is_number()) fail(key, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
    return record(key, x);
  }

  int integer(const std::string& key, std::optional<int> def = std::nullopt) {
    const json* v = raw(key, def.has_value());
    if (!v) return record(key, *def);
    if (!v->is_number_integer()) fail(key, "expected an integer");
    return record(key, v->get<int>());
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = raw(key, true);
    if (!v) return record(key, def);
    if (!v->is_boolean()) fail(key, "expected true or false");
    return record(key, v->get<bool>());
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    const json* v = raw(key, def.has_value());
    if (!v) return record(key, *def);
    if (!v->is_string()) fail(key, "expected a string");
    return record(key, v->get<std::string>());
  }

  cplx complex(const std::string& key, std::optional<cplx> def = std::nullopt) {
    const json* v = raw(key, def.has_value());
    const cplx z = v ? complex_from_json(*v, path(key)) : *def;
    resolved_[key] = complex_to_json(z);
    return z;
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key, false);
    if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "expected a non-empty array of numbers");
      out.push_back(x.get<double>());
    }
    resolved_[key] = out;
    return out;
  }

  void store(const std::string& key, json value) { resolved_[key] = std::move(value); }

  void require(bool ok, const std::string& key, const std::string& msg) const {
    if (!ok) fail(key, msg);
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(path(key) + ": " + msg);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(path(k) + ": unknown key");
  }
  const json& resolved() const { return resolved_; }
  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  template <class T>
  T record(const std::string& key, T v) {
    resolved_[key] = v;
    return v;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
  json resolved_ = json::object();
};

struct Context {
  fs::path base_dir;
  fs::path out_dir;
  json results = json::object();
  std::vector<std::string> outputs;
  std::string scatterer_hash;

  std::ofstream open(const std::string& name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (out_dir / name).string() + "'");
    outputs.push_back(name);
    return f;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
};

Scatterer read_scatterer(Params& p, const std::string& key, Context& ctx) {
  const json* v = p.raw(key, false);
  Scatterer s;
  if (v->is_string()) {
    fs::path path = v->get<std::string>();
    if (path.is_relative()) path = ctx.base_dir / path;
    try {
      s = load_scatterer(path.string());
    } catch (const ConfigError& e) {
      throw ConfigError(p.path(key) + ": " + e.what());
    }
  } else if (v->is_object()) {
    try {
      s = scatterer_from_json(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(p.path(key) + ": " + e.what());
    }
  } else {
    p.fail(key, "expected a file path or an inline scatterer object");
  }
  p.store(key, scatterer_to_json(s));
  const std::string h = hex64(scatterer_hash(s));
  ctx.scatterer_hash = ctx.scatterer_hash.empty() ? h : ctx.scatterer_hash + "," + h;
  return s;
}

Incident read_incident(Params& p, double k) {
  const json* v = p.raw("incident", true);
  static const json plane_default = {{"type", "plane"}, {"direction", 0.0}};
  Params q(v ? *v : plane_default, p.path("incident"));
  const std::string type = q.string("type", "plane");
  Incident inc;
  if (type == "plane") {
    inc = Incident::plane(k, q.number("direction", 0.0));
  } else if (type == "point") {
    const auto z = q.numbers("source");
    q.require(z.size() == 2, "source", "expected [x, y]");
    inc = Incident::point_source(k, {z[0], z[1]});
  } else if (type == "herglotz") {
    const json* ker = q.raw("kernel", false);
    if (!ker->is_array() || ker->size() < 3) q.fail("kernel", "expected at least three density values");
    std::vector<cplx> g;
    for (std::size_t i = 0; i < ker->size(); ++i)
      g.push_back(complex_from_json((*ker)[i], q.path("kernel") + "[" + std::to_string(i) + "]"));
    inc = Incident::herglotz(k, g);
    json stored = json::array();
    for (cplx z : g) stored.push_back(complex_to_json(z));
    q.store("kernel", stored);
  } else {
    q.fail("type", "expected plane, point or herglotz, got '" + type + "'");
  }
  q.finish();
  p.store("incident", q.resolved());
  try {
    inc.validate();
  } catch (const DomainError& e) {
    throw ConfigError(p.path("incident") + ": " + e.what());
  }
  return inc;
}

double read_wavenumber(Params& p, const std::string& key = "k") {
  const double k = p.number(key);
  p.require(k > 0, key, "must be positive");
  return k;
}

experiments::ForwardOptions read_forward(Params& p) {
  experiments::ForwardOptions o;
  const std::string m = p.string("method", "auto");
  if (m == "auto") o.method = experiments::ForwardOptions::Method::Auto;
  else if (m == "fem") o.method = experiments::ForwardOptions::Method::Fem;
  else if (m == "modal") o.method = experiments::ForwardOptions::Method::Modal;
  else p.fail("method", "expected auto, fem or modal");
  o.points_per_wavelength = p.number("points_per_wavelength", o.points_per_wavelength);
  p.require(o.points_per_wavelength >= 10, "points_per_wavelength", "must be at least 10");
  o.geometry_fraction = p.number("geometry_fraction", o.geometry_fraction);
  p.require(o.geometry_fraction > 0 && o.geometry_fraction <= 1, "geometry_fraction", "must lie in (0, 1]");
  o.rt_factor = p.number("rt_factor", o.rt_factor);
  p.require(o.rt_factor >= 1.5, "rt_factor", "must be at least 1.5");
  o.directions = p.integer("directions", o.directions);
  p.require(o.directions >= 8, "directions", "must be at least 8");
  return o;
}

std::vector<double> read_grid(Params& p, const std::string& key) {
  const json* v = p.raw(key, false);
  std::vector<double> g;
  if (v->is_array()) {
    g = p.numbers(key);
  } else if (v->is_object()) {
    Params q(*v, p.path(key));
    const double lo = q.number("min"), hi = q.number("max");
    const int n = q.integer("count");
    q.require(n >= 1, "count", "must be positive");
    q.require(n == 1 ? lo == hi : lo < hi, "max", "must exceed min");
    q.finish();
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    p.store(key, q.resolved());
  } else {
    p.fail(key, "expected an array or {min, max, count}");
  }
  for (double x : g) p.require(x > 0, key, "values must be positive");
  return g;
}

double domain_l2(const fem::Mesh& m, const std::function<cplx(const Vec2&)>& f) {
  const auto& rule = quad::triangle_rule7();
  double s = 0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t];
    for (std::size_t i = 0; i < rule.weights.size(); ++i) {
      const auto& l = rule.bary[i];
      s += rule.weights[i] * m.triangle_area(t) *
           std::norm(f(m.nodes[v[0]] * l[0] + m.nodes[v[1]] * l[1] + m.nodes[v[2]] * l[2]));
    }
  }
  return std::sqrt(s);
}

// Optional {"<name>_below": x, "<name>_above": x} bounds on a result value.
void check_bounds(Params& expect, const std::string& name, double value) {
  if (expect.has(name + "_below")) {
    const double b = expect.number(name + "_below");
    if (!(value < b)) throw AssertionFailure(name + " = " + format_double(value) + " is not below " + format_double(b));
  }
  if (expect.has(name + "_above")) {
    const double b = expect.number(name + "_above");
    if (!(value > b)) throw AssertionFailure(name + " = " + format_double(value) + " is not above " + format_double(b));
  }
}

Params read_expect(Params& p) {
  static const json empty = json::object();
  const json* v = p.raw("expect", true);
  return Params(v ? *v : empty, p.path("expect"));
}

void write_farfield(Context& ctx, const std::string& name, const FarFieldPattern& ff) {
  auto f = ctx.open(name);
  write_farfield_csv(f, ff);
}

// --- commands ---------------------------------------------------------------------------

void cmd_solve(Params& p, Context& ctx) {
  const Scatterer s = read_scatterer(p, "scatterer", ctx);
  const double k = read_wavenumber(p);
  const Incident inc = read_incident(p, k);
  const double Rs = circumradius(s);
  const double h = p.number("h", experiments::ForwardOptions{}.mesh_size(s, k));
  p.require(h > 0, "h", "must be positive");
  const double rt_factor = p.number("rt_factor", 2.0);
  p.require(rt_factor >= 1.5, "rt_factor", "must be at least 1.5");
  const int n_dtn = p.integer("n_dtn", -1);
  const int directions = p.integer("directions", 128);
  p.require(directions >= 8, "directions", "must be at least 8");
  const double Rt = rt_factor * Rs;
  const double rho = p.number("extraction_radius", 0.5 * (Rs + 0.9 * Rt));
  const bool write_field = p.boolean("write_field", true);
  Params expect = read_expect(p);

  auto mesh = std::make_shared<const fem::Mesh>(fem::mesh_scatterer(s, Rt, h, k));
  fem::FemOptions fo;
  fo.n_dtn = n_dtn;
  const auto sol = fem::solve(mesh, s, k, inc, fo);
  const auto ff = fem::near_to_far(sol, rho, uniform_directions(directions));

  const double us = sol.scattered_l2();
  const double ui = domain_l2(*mesh, [&](const Vec2& x) { return inc.value(x); });
  ctx.results = {{"nodes", mesh->nodes.size()},
                 {"triangles", mesh->triangles.size()},
                 {"truncation_radius", Rt},
                 {"residual", sol.residual},
                 {"n_dtn", sol.n_dtn},
                 {"dtn_tail", sol.dtn_tail},
                 {"dtn_warning", sol.dtn_warning},
                 {"scattered_l2", us},
                 {"incident_l2", ui},
                 {"scattered_relative", us / ui},
                 {"farfield_l2", ff.l2_norm()}};
  write_farfield(ctx, "farfield.csv", ff);
  {
    auto f = ctx.open("mesh.txt");
    fem::write_mesh(f, *mesh);
  }
  if (write_field) {
    auto f = ctx.open("field.csv");
    f << "x,y,re,im\n";
    for (std::size_t i = 0; i < mesh->nodes.size(); ++i)
      write_csv_row(f, {mesh->nodes[i].x, mesh->nodes[i].y, sol.us(i).real(), sol.us(i).imag()});
  }
  check_bounds(expect, "scattered_relative", us / ui);
  check_bounds(expect, "farfield_l2", ff.l2_norm());
  expect.finish();
  p.store("expect", expect.resolved());
}

void cmd_farfield(Params& p, Context& ctx) {
  const Scatterer s = read_scatterer(p, "scatterer", ctx);
  const double k = read_wavenumber(p);
  const Incident inc = read_incident(p, k);
  const auto opt = read_forward(p);
  Params expect = read_expect(p);
  const auto ff = experiments::far_field(s, k, inc, opt);
  ctx.results = {{"farfield_l2", ff.l2_norm()}, {"farfield_max", ff.max_abs()}};
  write_farfield(ctx, "farfield.csv", ff);
  check_bounds(expect, "farfield_l2", ff.l2_norm());
  expect.finish();
  p.store("expect", expect.resolved());
}

void cmd_ucp_verify(Params& p, Context& ctx) {
  const double beta = p.number("beta");
  p.require(beta > 0 && beta < kPi, "beta", "must lie in (0, pi)");
  const double bisector = p.number("bisector", 0.0);
  const double r0 = p.number("r0", 0.5);
  p.require(r0 > 0, "r0", "must be positive");
  const cplx eta = p.complex("eta", cplx{1.0});
  p.require(eta != cplx{}, "eta", "must be nonzero");
  const double gamma1 = p.number("gamma1", 2.0);
  p.require(gamma1 > 0, "gamma1", "must be positive");
  const double direction = p.number("field_direction", 0.4);
  const int order = p.integer("field_order", 16);
  p.require(order >= 1, "field_order", "must be positive");
  std::vector<double> tau;
  if (p.has("tau")) {
    tau = p.numbers("tau");
    for (std::size_t i = 1; i < tau.size(); ++i) p.require(tau[i] > tau[i - 1], "tau", "must be increasing");
    p.require(tau.size() >= 2 && tau[0] > 0, "tau", "need at least two positive values");
  } else {
    tau = cgo::geometric_grid(256, 65536);
    p.store("tau", tau);
  }
  ucp::UcpOptions o;
  o.max_step = p.integer("max_step", o.max_step);
  p.require(o.max_step >= 0 && o.max_step <= 200, "max_step", "must lie in [0, 200]");
  o.angle_bound = p.integer("angle_bound", static_cast<int>(o.angle_bound));
  p.require(o.angle_bound >= 1, "angle_bound", "must be positive");
  Params expect = read_expect(p);

  geometry::Sector sector;
  try {
    sector = geometry::Sector::centred(bisector, beta, r0);
    sector.validate();
  } catch (const DomainError& e) {
    throw ConfigError(p.path("bisector") + ": " + e.what());
  }
  const auto field = specfun::FourierBesselField::plane_wave(std::sqrt(gamma1), direction, std::max(order, o.max_step + 2));
  const auto R = ucp::ucp_verify(sector, eta, gamma1, field, tau, o);
  ctx.write_json("ucp.json", R.to_json());
  int forced = 0;
  for (const auto& st : R.steps) forced += st.forced_zero;
  ctx.results = {{"angle", R.angle.describe()},
                 {"all_nonsingular", R.all_nonsingular()},
                 {"first_singular", R.first_singular},
                 {"steps", R.steps.size()},
                 {"forced_zero_steps", forced}};
  if (expect.has("nonsingular")) {
    const bool want = expect.boolean("nonsingular", true);
    if (want != R.all_nonsingular())
      throw AssertionFailure(want ? "step " + std::to_string(R.first_singular) + " is singular"
                                  : "every step is nonsingular");
  }
  if (expect.has("first_singular")) {
    const int want = expect.integer("first_singular");
    if (want != R.first_singular)
      throw AssertionFailure("first singular step is " + std::to_string(R.first_singular) + ", expected " +
                             std::to_string(want));
  }
  if (expect.boolean("forced_zero", false) && forced != static_cast<int>(R.steps.size()))
    throw AssertionFailure("forced solution is not zero at every step");
  expect.finish();
  p.store("expect", expect.resolved());
}

void cmd_det_scan(Params& p, Context& ctx) {
  const double lo = p.number("beta_min", 0.01), hi = p.number("beta_max", 3.13);
  p.require(lo > 0 && hi < kPi && lo < hi, "beta_max", "need 0 < beta_min < beta_max < pi");
  const int n = p.integer("points", 10001);
  p.require(n >= 2 && n <= 10000000, "points", "must lie in [2, 1e7]");
  const int L = p.integer("max_step", 5);
  p.require(L >= 0 && L <= 200, "max_step", "must lie in [0, 200]");
  const double tol = p.number("zero_tol", 1e-9);
  p.require(tol > 0, "zero_tol", "must be positive");
  Params expect = read_expect(p);
  const bool must_match = expect.boolean("zeros_match", true);

  std::vector<double> beta(n);
  for (int i = 0; i < n; ++i) beta[i] = lo + (hi - lo) * i / (n - 1);
  {
    auto f = ctx.open("det_scan.csv");
    f << "beta";
    for (int l = 0; l <= L; ++l) f << ",det_step_" << l;
    f << ",det_m1,det_m2,det_param_re,det_param_im\n";
    std::vector<double> row;
    for (double b : beta) {
      row.assign(1, b);
      for (int l = 0; l <= L; ++l) row.push_back(ucp::det_step(b, l));
      const auto g = ucp::det_gradient(b);
      const cplx d = ucp::det_param_recovery(b);
      row.insert(row.end(), {g.detM1, g.detM2, d.real(), d.imag()});
      write_csv_row(f, row);
    }
  }
  json zeros = json::array();
  bool all_match = true;
  for (int l = 0; l <= L; ++l) {
    // Sign changes on the grid refined by bisection; the zeros are simple.
    std::vector<double> found;
    const auto d = [l](double b) { return ucp::det_step(b, l); };
    for (int i = 0; i + 1 < n; ++i) {
      double a = beta[i], b = beta[i + 1], fa = d(a), fb = d(b);
      if (fa == 0.0) {
        found.push_back(a);
        continue;
      }
      if (fa * fb > 0) continue;
      if (fb == 0.0) continue;  // picked up as the next left endpoint
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b), fm = d(m);
        if ((fm < 0) == (fa < 0)) a = m, fa = fm;
        else b = m;
      }
      found.push_back(0.5 * (a + b));
    }
    if (d(beta.back()) == 0.0) found.push_back(beta.back());
    std::vector<double> expected;
    for (double z : ucp::step_zero_set(l))
      if (z >= lo && z <= hi) expected.push_back(z);
    bool match = found.size() == expected.size();
    double worst = 0;
    for (std::size_t i = 0; match && i < found.size(); ++i) worst = std::max(worst, std::abs(found[i] - expected[i]));
    match = match && worst <= tol;
    all_match = all_match && match;
    zeros.push_back({{"ell", l}, {"found", found}, {"enumerated", expected}, {"max_error", worst}, {"match", match}});
  }
  ctx.write_json("det_zeros.json", zeros);
  ctx.results = {{"points", n}, {"max_step", L}, {"zeros_match", all_match}};
  if (must_match && !all_match) throw AssertionFailure("numerical zeros of det_step differ from the enumerated set");
  expect.finish();
  p.store("expect", expect.resolved());
}

void cmd_invis_scan(Params& p, Context& ctx) {
  const Scatterer s = read_scatterer(p, "scatterer", ctx);
  const auto grid = read_grid(p, "k_grid");
  const Incident inc = read_incident(p, grid.front());
  const auto opt = read_forward(p);
  const double theta = p.number("theta_inv", experiments::kThetaInv);
  p.require(theta > 0, "theta_inv", "must be positive");
  Params expect = read_expect(p);
  const std::string want = expect.string("outcome", "none");
  expect.require(want == "none" || want == "visible" || want == "below", "outcome", "expected none, visible or below");
  expect.finish();
  p.store("expect", expect.resolved());

  const auto R = experiments::invisibility_scan(s, grid, inc, opt, theta);
  {
    auto f = ctx.open("scan.csv");
    R.write_csv(f);
  }
  ctx.write_json("scan.json", R.to_json());
  int failed = 0;
  for (std::size_t i = 0; i < R.grid.size(); ++i) failed += R.failed(i);
  const double mr = R.min_relative();
  ctx.results = {{"points", R.grid.size()},
                 {"failed", failed},
                 {"flagged", R.flagged().size()},
                 {"min_relative", std::isfinite(mr) ? json(mr) : json(nullptr)}};
  if (failed == static_cast<int>(R.grid.size())) throw SolverError("every scan point failed: " + R.failure[0]);
  if (want == "visible" && !(mr > theta))
    throw AssertionFailure("minimum relative far-field norm " + format_double(mr) + " is not above " + format_double(theta));
  if (want == "below" && R.flagged().size() + failed != R.grid.size())
    throw AssertionFailure("some scan points are above the threshold");
}

void cmd_diff(Params& p, Context& ctx) {
  const Scatterer a = read_scatterer(p, "scatterer_a", ctx);
  const Scatterer b = read_scatterer(p, "scatterer_b", ctx);
  const double k = read_wavenumber(p);
  const Incident inc = read_incident(p, k);
  const auto opt = read_forward(p);
  Params expect = read_expect(p);
  const auto fa = experiments::far_field(a, k, inc, opt);
  const auto fb = experiments::far_field(b, k, inc, opt);
  const double d = l2_difference(fa, fb);
  write_farfield(ctx, "farfield_a.csv", fa);
  write_farfield(ctx, "farfield_b.csv", fb);
  ctx.results = {{"difference", d}, {"norm_a", fa.l2_norm()}, {"norm_b", fb.l2_norm()}};
  ctx.write_json("diff.json", ctx.results);
  check_bounds(expect, "difference", d);
  expect.finish();
  p.store("expect", expect.resolved());
}

void cmd_admissibility(Params& p, Context& ctx) {
  const Scatterer s = read_scatterer(p, "scatterer", ctx);
  std::vector<const geometry::Polygon*> polys;
  if (const auto* n = std::get_if<geometry::NestScatterer>(&s))
    for (const auto& poly : n->layers) polys.push_back(&poly);
  else if (const auto* c = std::get_if<geometry::CellScatterer>(&s))
    for (const auto& poly : c->cells) polys.push_back(&poly);
  else
    p.fail("scatterer", "admissibility needs a polygonal scatterer");
  const double k = read_wavenumber(p);
  const Incident inc = read_incident(p, k);
  const double Rs = circumradius(s);
  const double h = p.number("h", std::min(experiments::ForwardOptions{}.mesh_size(s, k), 0.1 * Rs));
  const double rt_factor = p.number("rt_factor", 2.0);
  p.require(rt_factor >= 1.5, "rt_factor", "must be at least 1.5");

  // Vertices with their interior angle in the first polygon that owns them.
  std::vector<std::pair<Vec2, double>> verts;
  double sep = std::numeric_limits<double>::infinity();
  for (const auto* poly : polys)
    for (std::size_t i = 0; i < poly->size(); ++i) {
      const Vec2 v = (*poly)[i];
      bool seen = false;
      for (const auto& [w, a] : verts) {
        const double d = dist(v, w);
        if (d < 1e-12) seen = true;
        else sep = std::min(sep, d);
      }
      if (!seen) verts.push_back({v, poly->interior_angle(i)});
    }
  const double rho0 = p.number("rho0", std::min(0.05, 0.1 * sep));
  p.require(rho0 > 0, "rho0", "must be positive");
  const int count = p.integer("radii", 4);
  p.require(count >= 4, "radii", "need at least four radii");
  experiments::AdmissibilityOptions ao;
  ao.theta = p.number("theta_adm", ao.theta);
  p.require(ao.theta > 0, "theta_adm", "must be positive");
  ao.exclude_right_angle_for_cond_i = p.boolean("exclude_right_angle_for_cond_i", false);
  Params expect = read_expect(p);
  const bool want_all = expect.boolean("all_admissible", false);
  expect.finish();
  p.store("expect", expect.resolved());

  auto mesh = std::make_shared<const fem::Mesh>(fem::mesh_scatterer(s, rt_factor * Rs, h, k));
  const auto sol = fem::solve(mesh, s, k, inc);
  const auto field = experiments::fem_field(sol);
  const auto radii = experiments::geometric_radii(rho0, count);
  json out = json::array();
  auto csv = ctx.open("admissibility.csv");
  csv << "x,y,angle,verdict,limit_u,limit_d1,limit_d2,limit_grad,converged\n";
  int bad = 0;
  for (const auto& [v, angle] : verts) {
    auto o = ao;
    o.corner_angle = angle;
    const auto A = experiments::admissibility_check(field, v, radii, o);
    bad += A.verdict == experiments::Admissibility::Verdict::Inadmissible;
    json j = A.to_json();
    j["vertex"] = {v.x, v.y};
    j["angle"] = angle;
    out.push_back(j);
    csv << format_double(v.x) << ',' << format_double(v.y) << ',' << format_double(angle) << ',' << A.describe() << ','
        << format_double(A.limit_u) << ',' << format_double(A.limit_d1) << ',' << format_double(A.limit_d2) << ','
        << format_double(A.limit_grad) << ',' << (A.converged ? 1 : 0) << '\n';
  }
  ctx.write_json("admissibility.json", out);
  ctx.results = {{"vertices", verts.size()}, {"inadmissible", bad}, {"dtn_warning", sol.dtn_warning}};
  if (want_all && bad > 0) throw AssertionFailure(std::to_string(bad) + " vertices are inadmissible");
}

json environment() {
  return {{"threads", thread_count()},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

void check_thread_env() {
  if (const char* env = std::getenv("CONDSCAT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1 || n > 4096)
      throw ConfigError("CONDSCAT_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
}

}  // namespace

Outcome run(const std::string& command, const json& config, const std::string& base_dir,
            const std::string& output_override) {
  Outcome o;
  Context ctx;
  ctx.base_dir = base_dir.empty() ? fs::path(".") : fs::path(base_dir);
  json resolved;
  bool have_out = false;
  try {
    try {
      check_thread_env();
      if (std::find(commands().begin(), commands().end(), command) == commands().end())
        throw ConfigError("unknown command '" + command + "'");
      Params p(config, "config");
      const std::string out = p.string("output", "condscat-out");
      ctx.out_dir = output_override.empty() ? fs::path(out) : fs::path(output_override);
      if (!output_override.empty()) p.store("output", output_override);
      std::error_code ec;
      fs::create_directories(ctx.out_dir, ec);
      if (ec) throw ConfigError("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());
      have_out = true;
      if (command == "solve") cmd_solve(p, ctx);
      else if (command == "farfield") cmd_farfield(p, ctx);
      else if (command == "ucp-verify") cmd_ucp_verify(p, ctx);
      else if (command == "det-scan") cmd_det_scan(p, ctx);
      else if (command == "invis-scan") cmd_invis_scan(p, ctx);
      else if (command == "diff") cmd_diff(p, ctx);
      else cmd_admissibility(p, ctx);
      p.finish();
      resolved = p.resolved();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(e.what());
    }
  } catch (const ConfigError& e) {
    o.code = kConfigError, o.status = "config_error", o.reason = e.what();
  } catch (const AssertionFailure& e) {
    o.code = kAssertionFailure, o.status = "assertion_failure", o.reason = e.what();
  } catch (const std::exception& e) {
    o.code = kSolverFailure, o.status = "solver_failure", o.reason = e.what();
  }
  if (resolved.is_null()) resolved = config;
  o.manifest = {{"tool", "condscat"},
                {"version", CONDSCAT_VERSION},
                {"command", command},
                {"config", resolved},
                {"config_hash", hex64(fnv1a(resolved.dump()))},
                {"status", o.status},
                {"exit_code", o.code},
                {"results", ctx.results},
                {"outputs", ctx.outputs},
                {"environment", environment()}};
  if (!ctx.scatterer_hash.empty()) o.manifest["scatterer_hash"] = ctx.scatterer_hash;
  if (!o.reason.empty()) o.manifest["reason"] = o.reason;
  if (have_out) {
    std::ofstream f(ctx.out_dir / "manifest.json", std::ios::binary);
    if (f) f << o.manifest.dump(2) << '\n';
  }
  return o;
}

Outcome run_file(const std::string& command, const std::string& config_path, const std::string& output_override) {
  std::ifstream in(config_path);
  json j;
  std::string err;
  if (!in) {
    err = "cannot open config file '" + config_path + "'";
  } else {
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      err = "config file '" + config_path + "' is not valid JSON: " + e.what();
    }
  }
  if (!err.empty()) {
    Outcome o;
    o.code = kConfigError, o.status = "config_error", o.reason = err;
    o.manifest = {{"tool", "condscat"}, {"command", command}, {"status", o.status}, {"exit_code", o.code}, {"reason", err}};
    return o;
  }
  return run(command, j, fs::path(config_path).parent_path().string(), output_override);
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"condscat: conductive medium scattering experiments"};
  app.set_version_flag("--version", CONDSCAT_VERSION);
  app.require_subcommand(1);
  std::string config, output;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c, "run " + c + " on a JSON config");
    sub->add_option("config", config, "config file (JSON)")->required();
    sub->add_option("-o,--out", output, "output directory, overrides the config's \"output\"");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << json{{"status", "config_error"}, {"exit_code", kConfigError}, {"reason", e.what()}}.dump() << '\n';
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const Outcome o = run_file(command, config, output);
  json line{{"status", o.status}, {"exit_code", o.code}};
  if (!o.reason.empty()) line["reason"] = o.reason;
  (o.code == kOk ? out : err) << line.dump() << '\n';
  return o.code;
}

}  // namespace condscat::cli
