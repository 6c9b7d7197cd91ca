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
#include <sstream>

#include "condscat/experiments.hpp"
#include "condscat/geometry.hpp"
#include "condscat/scatter_disk.hpp"
#include "doctest.h"

using namespace condscat;
using namespace condscat::experiments;

namespace {

Scatterer preset(const std::string& name) { return load_scatterer(std::string(CONDSCAT_DATA_DIR) + "/presets/" + name + ".json"); }

FieldFn linear_field(cplx a, cplx b, cplx c) {
  return [=](const Vec2& x) { return FieldValue{a + b * x.x + c * x.y, {b, c}}; };
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("bundled triangle has irrational angles") {
    const Scatterer s = preset("irrational_triangle");
    const auto& tri = std::get<geometry::NestScatterer>(s).layers[0];
    for (std::size_t i = 0; i < 3; ++i)
      CHECK_FALSE(geometry::classify_angle(tri.interior_angle(i), 10000).rational());
  }

  TEST_CASE("empty scatterer scans below 1e-8") {
    const auto r = invisibility_scan(preset("empty_triangle"), {4.0, 0.5, 2.0, 1.0}, Incident::plane(1.0, 0.3));
    CHECK(r.grid == std::vector<double>{0.5, 1.0, 2.0, 4.0});
    for (double n : r.norm) CHECK(n < 1e-8);
    CHECK(r.flagged().size() == 4);
  }

  TEST_CASE("irrational triangle is visible at every wavenumber") {
    const auto r = invisibility_scan(preset("irrational_triangle"), {0.5, 1.0, 2.0, 4.0}, Incident::plane(1.0, 0.3));
    CHECK(r.flagged().empty());
    CHECK(r.min_relative() > kThetaInv);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      CHECK_FALSE(r.failed(i));
      CHECK(r.relative[i] == doctest::Approx(r.norm[i]));  // plane wave: unit incident scale
    }
    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str().rfind("k,norm,relative,status\n0.5,", 0) == 0);
    const auto j = r.to_json();
    CHECK(j["metadata"]["scatterer_hash"] == hex64(scatterer_hash(preset("irrational_triangle"))));
    CHECK(j["flagged"].empty());
  }

  TEST_CASE("disk scan uses the modal series") {
    const disk::DiskScatterer d{{1.0}, {cplx{2.0}}, {cplx{0.0}}};
    const auto r = invisibility_scan(d, {1.0}, Incident::plane(1.0, 0.0));
    const auto ref = disk::far_field(disk::mie_solve(d, 1.0, Incident::plane(1.0, 0.0)), uniform_directions(128));
    CHECK(r.norm[0] == doctest::Approx(ref.l2_norm()).epsilon(1e-12));
    CHECK(r.norm[0] > 0.1);
  }

  TEST_CASE("far-field differences") {
    const double k = 2.0;
    const Incident inc = Incident::plane(k, 0.4);
    const auto a = preset("nested_squares"), b = preset("nested_squares_inner"), c = preset("nested_squares_eta");
    CHECK(farfield_difference(a, a, k, inc) == 0.0);
    const double ab = farfield_difference(a, b, k, inc);
    const double ac = farfield_difference(a, c, k, inc);
    const double bc = farfield_difference(b, c, k, inc);
    CHECK(ab > kThetaInv);
    CHECK(ac > kThetaInv);
    CHECK(farfield_difference(b, a, k, inc) == doctest::Approx(ab).epsilon(1e-12));
    CHECK(ab <= ac + bc + 1e-12);
    CHECK(ac <= ab + bc + 1e-12);

    // Same disk by two solvers agrees within the FEM error budget.
    const auto d = preset("disk");
    ForwardOptions fem;
    fem.method = ForwardOptions::Method::Fem;
    const auto mie = far_field(d, k, inc);
    const double diff = l2_difference(far_field(d, k, inc, fem), mie);
    CHECK(diff < 1e-2 * mie.l2_norm());
    CHECK_THROWS_AS(far_field(a, k, inc, ForwardOptions{ForwardOptions::Method::Modal}), DomainError);
  }

  TEST_CASE("admissibility of synthetic fields") {
    const auto rho = geometric_radii(0.1);
    const Incident plane = Incident::plane(3.0, 0.7);
    auto A = admissibility_check(incident_field(plane), {0.2, -0.1}, rho);
    CHECK(A.verdict == Admissibility::Verdict::CondI);
    CHECK(A.limit_u == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(A.converged);

    A = admissibility_check(linear_field(2.5, 0, 0), {0, 0}, rho);
    CHECK(A.describe() == "CondI");
    CHECK(A.limit_u == doctest::Approx(2.5).epsilon(1e-14));

    A = admissibility_check(linear_field(0, 1, 0), {0, 0}, rho);
    CHECK(A.describe() == "CondII(d1)");
    CHECK(A.limit_u < 1e-14);
    CHECK(A.limit_d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(A.limit_d2 == 0.0);

    A = admissibility_check(linear_field(0, 0, cplx{0, 2}), {0, 0}, rho);
    CHECK(A.describe() == "CondII(d2)");
    A = admissibility_check(linear_field(0, 1, cplx{0, 1}), {0, 0}, rho);
    CHECK(A.describe() == "CondII(d1,d2)");
    A = admissibility_check(linear_field(0, 0, 0), {0, 0}, rho);
    CHECK(A.describe() == "Inadmissible");
    CHECK_FALSE(A.angle_filtered);
    // u = x1 - 1 vanishes at (1, 0) only.
    A = admissibility_check(linear_field(-1, 1, 0), {1, 0}, rho);
    CHECK(A.describe() == "CondII(d1)");
    A = admissibility_check(linear_field(-1, 1, 0), {0.5, 0}, rho);
    CHECK(A.describe() == "CondI");
  }

  TEST_CASE("angle restriction applies to the gradient condition") {
    const auto rho = geometric_radii(0.1);
    AdmissibilityOptions opt;
    opt.corner_angle = kPi / 2;
    auto A = admissibility_check(linear_field(0, 1, 0), {0, 0}, rho, opt);
    CHECK(A.describe() == "Inadmissible");
    CHECK(A.angle_filtered);
    A = admissibility_check(linear_field(1, 1, 0), {0, 0}, rho, opt);
    CHECK(A.describe() == "CondI");
    opt.exclude_right_angle_for_cond_i = true;
    A = admissibility_check(linear_field(1, 1, 0), {0, 0}, rho, opt);
    CHECK(A.describe() == "Inadmissible");
    opt.corner_angle = 1.0;
    A = admissibility_check(linear_field(0, 1, 0), {0, 0}, rho, opt);
    CHECK(A.describe() == "CondII(d1)");
  }

  TEST_CASE("admissibility is invariant under scaling the field") {
    const auto rho = geometric_radii(0.05);
    const Incident plane = Incident::plane(2.0, 0.1);
    for (const cplx c : {cplx{1e-6, 0}, cplx{0, 3e4}, cplx{-2, 5}}) {
      const auto scaled = [&](const FieldFn& f) {
        return FieldFn([f, c](const Vec2& x) {
          auto v = f(x);
          return FieldValue{c * v.u, {c * v.grad[0], c * v.grad[1]}};
        });
      };
      for (const auto& f : {incident_field(plane), linear_field(0, 1, 0), linear_field(0, cplx{0, 1}, 2)}) {
        CHECK(admissibility_check(scaled(f), {0, 0}, rho).describe() == admissibility_check(f, {0, 0}, rho).describe());
      }
    }
  }

  TEST_CASE("admissibility input checks") {
    const auto f = linear_field(1, 0, 0);
    CHECK_THROWS_AS(admissibility_check(f, {0, 0}, {0.1, 0.05, 0.025}), DomainError);
    CHECK_THROWS_AS(admissibility_check(f, {0, 0}, {0.1, 0.05, 0.02, 0.01}), DomainError);
    CHECK_THROWS_AS(admissibility_check(f, {0, 0}, {0.0125, 0.025, 0.05, 0.1}), DomainError);
    CHECK_THROWS_AS(geometric_radii(-1.0), DomainError);
  }

  TEST_CASE("total field at the vertices in the low-frequency regime") {
    const Scatterer s = preset("weak_triangle");
    const auto& tri = std::get<geometry::NestScatterer>(s).layers[0];
    const double k = 0.1 / tri.diameter();
    const double Rt = 2 * circumradius(s);
    auto mesh = std::make_shared<const fem::Mesh>(fem::mesh_scatterer(s, Rt, 0.05, k));
    const auto sol = fem::solve(mesh, s, k, Incident::plane(k, 0.9));
    const auto field = fem_field(sol);
    for (std::size_t i = 0; i < 3; ++i) {
      AdmissibilityOptions opt;
      opt.corner_angle = tri.interior_angle(i);
      const auto A = admissibility_check(field, tri[i], geometric_radii(0.05), opt);
      CHECK(A.describe() == "CondI");
      CHECK(std::abs(A.limit_u - 1.0) < 0.1);
    }
  }

  TEST_CASE("regularity probe") {
    // Smooth field away from the scatterer: Lipschitz.
    const auto mie = disk::mie_solve({{1.0}, {cplx{2.0}}, {cplx{0.5}}}, 2.0, Incident::plane(2.0, 0.0));
    const auto smooth = corner_regularity_probe(modal_field(mie), {1.6, 0.3}, geometric_radii(0.05, 6));
    CHECK(smooth.alpha == doctest::Approx(1.0).epsilon(0.05));
    CHECK(smooth.r2 > 0.99);
    CHECK_FALSE(smooth.unreliable);

    const auto flat = corner_regularity_probe(linear_field(3, 0, 0), {0, 0}, geometric_radii(0.1, 5));
    CHECK(flat.degenerate);
    CHECK(flat.unreliable);

    const Scatterer sq = geometry::NestScatterer{{geometry::Polygon::square(1.0)},
                                                 {geometry::LinearIndex::constant(2.0)}, {cplx{1.0}}};
    const double k = 2.0;
    auto mesh = std::make_shared<const fem::Mesh>(fem::mesh_scatterer(sq, 2.0, 0.05, k));
    const auto sol = fem::solve(mesh, sq, k, Incident::plane(k, 0.3));
    const auto corner = corner_regularity_probe(sol, {0.5, 0.5});
    CHECK(corner.alpha > 0.2);
    CHECK(corner.alpha <= 1.2);
    CHECK(corner.r2 > 0.9);
    CHECK_THROWS_AS(corner_regularity_probe(sol, {0.5, 0.0}), DomainError);
  }
}
