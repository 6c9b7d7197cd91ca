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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "condscat/quadrature.hpp"
#include "condscat/scatter_disk.hpp"
#include "condscat/scatter_fem.hpp"
#include "doctest.h"

using namespace condscat;
using namespace condscat::fem;
using geometry::LinearIndex;
using geometry::Polygon;

namespace {

Scatterer unit_square(cplx q, cplx eta) {
  return geometry::NestScatterer{{Polygon::square(1.0)}, {LinearIndex::constant(q)}, {eta}};
}

Scatterer nested_squares() {
  return geometry::NestScatterer{{Polygon::square(1.2), Polygon::square(0.5)},
                                 {LinearIndex::constant(2.0), LinearIndex::constant(3.0)},
                                 {cplx{0.5}, cplx{-0.4}}};
}

const disk::DiskScatterer kDisk{{1.0}, {cplx{2.0}}, {cplx{0.5}}};

std::shared_ptr<const Mesh> mesh_of(const Scatterer& s, double Rt, double h, double k) {
  return std::make_shared<const Mesh>(mesh_scatterer(s, Rt, h, k));
}

// Length of the union of tagged mesh edges lying on segment [a, b].
double covered_length(const Mesh& m, Vec2 a, Vec2 b) {
  const double L = dist(a, b);
  double s = 0;
  for (const auto& e : m.edges) {
    if (e.tag < 0) continue;
    const Vec2 p = m.nodes[e.a], q = m.nodes[e.b];
    const auto off = [&](Vec2 x) { return std::abs(cross(b - a, x - a)) / L; };
    if (off(p) < 1e-12 && off(q) < 1e-12) s += dist(p, q);
  }
  return s;
}

// L2 error of the nodal scattered field against the exact disk solution, 7-point rule per triangle.
double l2_error(const FemSolution& sol, const disk::ModalSolution& exact) {
  const auto& rule = quad::triangle_rule7();
  const Mesh& m = *sol.mesh;
  double e = 0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t];
    for (std::size_t i = 0; i < rule.weights.size(); ++i) {
      const auto& l = rule.bary[i];
      const Vec2 x = m.nodes[v[0]] * l[0] + m.nodes[v[1]] * l[1] + m.nodes[v[2]] * l[2];
      const cplx uh = l[0] * sol.us(v[0]) + l[1] * sol.us(v[1]) + l[2] * sol.us(v[2]);
      const cplx ex = disk::field_sample(exact, x).value - exact.incident.value(x);
      e += rule.weights[i] * m.triangle_area(t) * std::norm(uh - ex);
    }
  }
  return std::sqrt(e);
}

}  // namespace

TEST_SUITE("fem") {
  TEST_CASE("square edges appear as chains of mesh edges") {
    const auto m = mesh_scatterer(unit_square(2.0, 0.5), 2.0, 0.05);
    const Polygon sq = Polygon::square(1.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(covered_length(m, sq[i], sq.next(i)) == doctest::Approx(1.0).epsilon(1e-12));
    // No triangle straddles the interface.
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& v = m.triangles[t];
      const Vec2 g = (m.nodes[v[0]] + m.nodes[v[1]] + m.nodes[v[2]]) * (1.0 / 3.0);
      REQUIRE((m.region[t] == 0) == sq.contains(g));
      CHECK(m.triangle_area(t) > 0);
    }
    // Conformity: every interior edge is shared by exactly two triangles.
    std::map<std::pair<int, int>, int> count;
    for (const auto& v : m.triangles)
      for (int i = 0; i < 3; ++i) count[{std::min(v[i], v[(i + 1) % 3]), std::max(v[i], v[(i + 1) % 3])}]++;
    int boundary = 0;
    for (const auto& [e, c] : count) {
      CHECK(c <= 2);
      boundary += c == 1;
    }
    CHECK(boundary == static_cast<int>(m.boundary.size()));
    for (int b : m.boundary) CHECK(norm(m.nodes[b]) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("nested squares carry distinct interface tags") {
    const auto m = mesh_scatterer(nested_squares(), 2.0, 0.08);
    std::set<int> tags;
    for (const auto& e : m.edges)
      if (e.tag >= 0) tags.insert(e.tag);
    CHECK(tags == std::set<int>{0, 1});
    CHECK(m.interface_count == 2);
    for (const auto& e : m.edges) {
      if (e.tag < 0) continue;
      const Vec2 mid = (m.nodes[e.a] + m.nodes[e.b]) * 0.5;
      const double half = e.tag == 0 ? 0.6 : 0.25;
      CHECK(std::max(std::abs(mid.x), std::abs(mid.y)) == doctest::Approx(half).epsilon(1e-12));
    }
  }

  TEST_CASE("corner grading reaches the h squared floor") {
    const double h = 0.05;
    const auto m = mesh_scatterer(unit_square(2.0, 0.5), 2.0, h);
    const Polygon sq = Polygon::square(1.0);
    for (std::size_t c = 0; c < 4; ++c) {
      double dmin = 1e9;
      for (std::size_t t = 0; t < m.triangles.size(); ++t)
        for (int v : m.triangles[t])
          if (dist(m.nodes[v], sq[c]) < 1e-14) dmin = std::min(dmin, m.triangle_diameter(t));
      CHECK(dmin <= h * h + 1e-12);
    }
    double dmax = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) dmax = std::max(dmax, m.triangle_diameter(t));
    CHECK(dmax <= h * (1 + 1e-9));
  }

  TEST_CASE("mesh preconditions") {
    CHECK_THROWS_AS(mesh_scatterer(unit_square(2.0, 0.5), 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(mesh_scatterer(unit_square(2.0, 0.5), 0.8, 0.05), DomainError);
    CHECK_THROWS_AS(mesh_scatterer(unit_square(2.0, 0.5), 2.0, 0.2, 5.0), DomainError);
    CHECK_NOTHROW(mesh_scatterer(unit_square(2.0, 0.5), 2.0, 0.1, 5.0));
  }

  TEST_CASE("mesh export") {
    const auto m = mesh_scatterer(kDisk, 2.0, 0.3);
    std::ostringstream os;
    write_mesh(os, m);
    std::istringstream is(os.str());
    std::string magic, word;
    int version = 0;
    std::size_t n = 0;
    is >> magic >> version >> word >> n;
    CHECK(magic == "condscat-mesh");
    CHECK(version == 1);
    CHECK(word == "nodes");
    CHECK(n == m.nodes.size());
    double x, y;
    for (std::size_t i = 0; i < n; ++i) is >> x >> y;
    is >> word >> n;
    CHECK(word == "triangles");
    CHECK(n == m.triangles.size());
    int a, b, c, r;
    for (std::size_t i = 0; i < n; ++i) is >> a >> b >> c >> r;
    is >> word >> n;
    CHECK(word == "edges");
    CHECK(n == m.edges.size());
    CHECK(is.good());
  }

  TEST_CASE("no scatterer, no scattered field") {
    const double k = 2.0;
    const Scatterer s = unit_square(1.0, 0.0);
    const auto sol = solve(mesh_of(s, 2.0, 0.1, k), s, k, Incident::plane(k, 0.4));
    double ui = 0;
    for (std::size_t t = 0; t < sol.mesh->triangles.size(); ++t) ui += sol.mesh->triangle_area(t);
    CHECK(sol.scattered_l2() < 1e-8 * std::sqrt(ui));
    const auto ff = near_to_far(sol, 1.5, uniform_directions(32));
    CHECK(ff.max_abs() == 0.0);
  }

  TEST_CASE("disk far field against the modal oracle") {
    const double k = 2.0, lambda = 2 * kPi / k;
    const Incident inc = Incident::plane(k, 0.0);
    const auto dirs = uniform_directions(64);
    const auto ref = disk::far_field(disk::mie_solve(kDisk, k, inc), dirs);
    double prev = 1e9;
    for (double div : {20.0, 40.0}) {
      const auto sol = solve(mesh_of(kDisk, 2.0, lambda / div, k), kDisk, k, inc);
      CHECK(sol.residual < 1e-10);
      CHECK_FALSE(sol.dtn_warning);
      const double err = relative_l2(near_to_far(sol, 1.2, dirs), ref);
      CHECK(err < 1e-2);
      CHECK(err < 0.5 * prev);
      prev = err;
    }
  }

  TEST_CASE("second-order convergence against the exact disk solution") {
    // Penetrable disk without interface term; the exact field is a Bessel series in every region.
    const disk::DiskScatterer d{{1.0}, {cplx{2.0}}, {cplx{0.0}}};
    const double k = 2.0, lambda = 2 * kPi / k;
    const Incident inc = Incident::plane(k, 0.3);
    const auto exact = disk::mie_solve(d, k, inc);
    std::vector<double> hs, errs;
    for (double div : {10.0, 20.0, 40.0}) {
      hs.push_back(lambda / div);
      errs.push_back(l2_error(solve(mesh_of(d, 2.0, hs.back(), k), d, k, inc), exact));
    }
    const double order = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
    CHECK(order > 1.8);
    CHECK(order < 2.4);
  }

  TEST_CASE("far field does not depend on the extraction circle") {
    const double k = 2.0, lambda = 2 * kPi / k, Rt = 2.0;
    const Incident inc = Incident::plane(k, 1.0);
    const auto dirs = uniform_directions(48);
    double prev = 1e9;
    for (double div : {20.0, 40.0}) {
      const auto sol = solve(mesh_of(kDisk, Rt, lambda / div, k), kDisk, k, inc);
      const auto a = near_to_far(sol, 0.6 * Rt, dirs);
      const auto b = near_to_far(sol, 0.8 * Rt, dirs);
      const double d = relative_l2(a, b);
      CHECK(d < 5e-3);
      CHECK(d < prev);
      prev = d;
    }
    const auto sol = solve(mesh_of(kDisk, Rt, lambda / 10, k), kDisk, k, inc);
    CHECK_THROWS_AS(near_to_far(sol, 0.9, dirs), DomainError);
    CHECK_THROWS_AS(near_to_far(sol, Rt, dirs), DomainError);
  }

  TEST_CASE("conductive jump condition holds in the limit") {
    const double k = 2.0, lambda = 2 * kPi / k;
    const Incident inc = Incident::plane(k, 0.0);
    std::vector<double> rel;
    for (double div : {10.0, 20.0, 40.0}) {
      const auto sol = solve(mesh_of(kDisk, 2.0, lambda / div, k), kDisk, k, inc);
      const auto j = flux_jump(sol, 0);
      REQUIRE(j.reference > 0);
      rel.push_back(j.error / j.reference);
    }
    CHECK(rel[1] < 0.7 * rel[0]);
    CHECK(rel[2] < 0.7 * rel[1]);
    const auto sol = solve(mesh_of(kDisk, 2.0, lambda / 10, k), kDisk, k, inc);
    CHECK_THROWS_AS(flux_jump(sol, 3), DomainError);
  }

  TEST_CASE("field evaluation near the oracle") {
    const double k = 2.0, lambda = 2 * kPi / k;
    const Incident inc = Incident::plane(k, 0.7);
    const auto exact = disk::mie_solve(kDisk, k, inc);
    const auto sol = solve(mesh_of(kDisk, 2.0, lambda / 40, k), kDisk, k, inc);
    for (const Vec2 x : {Vec2{0.3, 0.2}, Vec2{-0.5, 0.6}, Vec2{1.4, -0.2}, Vec2{0.0, -1.7}}) {
      const auto s = disk::field_sample(exact, x);
      CHECK(std::abs(sol.total(x) - s.value) < 2e-2);
      const auto g = sol.total_gradient(x);
      CHECK(std::abs(g[0] - s.gradient[0]) + std::abs(g[1] - s.gradient[1]) < 0.2);
    }
    CHECK_THROWS_AS(sol.scattered({3.0, 0.0}), DomainError);
  }

  TEST_CASE("linearity in the incident field") {
    const double k = 2.0;
    const Scatterer s = nested_squares();
    const auto mesh = mesh_of(s, 2.0, 0.25, k);
    std::vector<cplx> g1(16), g2(16), g3(16);
    for (int j = 0; j < 16; ++j) {
      g1[j] = std::exp(kI * (0.3 * j));
      g2[j] = cplx{std::cos(j * 0.9), 0.5};
      g3[j] = 2.0 * g1[j] - cplx{0, 3} * g2[j];
    }
    const auto a = solve(mesh, s, k, Incident::herglotz(k, g1));
    const auto b = solve(mesh, s, k, Incident::herglotz(k, g2));
    const auto c = solve(mesh, s, k, Incident::herglotz(k, g3));
    const Eigen::VectorXcd combo = 2.0 * a.us - cplx{0, 3} * b.us;
    CHECK((c.us - combo).norm() < 1e-10 * c.us.norm());
  }

  TEST_CASE("cell scatterer matches the equivalent single polygon") {
    // Two half-squares with equal index and no interface term are one square.
    const double k = 2.0, lambda = 2 * kPi / k;
    const geometry::CellScatterer cells{{Polygon{{{-0.5, -0.5}, {0.0, -0.5}, {0.0, 0.5}, {-0.5, 0.5}}},
                                         Polygon{{{0.0, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {0.0, 0.5}}}},
                                        cplx{0.0},
                                        {LinearIndex::constant(2.0), LinearIndex::constant(2.0)}};
    const Scatterer one = unit_square(2.0, 0.0);
    const Incident inc = Incident::plane(k, 0.5);
    const auto dirs = uniform_directions(32);
    const auto a = near_to_far(solve(mesh_of(cells, 2.0, lambda / 20, k), cells, k, inc), 1.2, dirs);
    const auto b = near_to_far(solve(mesh_of(one, 2.0, lambda / 20, k), one, k, inc), 1.2, dirs);
    CHECK(relative_l2(a, b) < 5e-3);
    CHECK(a.l2_norm() > 0.1);
  }

  TEST_CASE("solver preconditions") {
    const double k = 2.0;
    const auto mesh = mesh_of(kDisk, 2.0, 0.5, 0.0);
    CHECK_THROWS_AS(solve(mesh, kDisk, k, Incident::plane(k, 0.0)), DomainError);
    const auto fine = mesh_of(kDisk, 2.0, 0.2, k);
    CHECK_THROWS_AS(solve(fine, kDisk, k, Incident::plane(3.0, 0.0)), DomainError);
    CHECK_THROWS_AS(solve(fine, kDisk, k, Incident::point_source(k, {0.5, 0.0})), DomainError);
    CHECK_THROWS_AS(solve(nullptr, kDisk, k, Incident::plane(k, 0.0)), DomainError);
  }
}
