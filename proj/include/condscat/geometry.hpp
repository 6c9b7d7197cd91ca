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

//! \file geometry.hpp
//! Corner sectors, convex polygons and the two layered scatterer layouts (nested
//! polygons and polygonal cells). Polygons are counterclockwise vertex lists.
//! All values are immutable once built and safe to share across threads.

#ifndef CONDSCAT_GEOMETRY_HPP_
#define CONDSCAT_GEOMETRY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "condscat/common.hpp"

namespace condscat::geometry {

/// Truncated corner {x = r(cos t, sin t) : theta_m <= t <= theta_M, 0 < r < r0}.
struct Sector {
  double theta_m = 0.0;
  double theta_M = 0.0;
  double r0 = 1.0;

  double opening() const { return theta_M - theta_m; }
  /// Throws DomainError unless -pi <= theta_m < theta_M < pi, opening < pi and r0 > 0.
  void validate() const;
  /// Sector with the given opening centred on the ray at angle `bisector`.
  static Sector centred(double bisector, double opening, double r0);
};

struct AngleClass {
  enum class Kind { Rational, IrrationalWithin };
  Kind kind = Kind::IrrationalWithin;
  std::int64_t p = 0;  // valid for Rational
  std::int64_t q = 0;
  std::int64_t bound = 0;  // denominator search bound Q
  double error = 0.0;      // |omega - p pi / q| for the best candidate found

  bool rational() const { return kind == Kind::Rational; }
  std::string describe() const;
};

/// Bounded-denominator rationality test of omega/pi via continued fractions.
/// Returns the lowest-denominator p/q (q <= Q) with |omega - p pi / q| < tol, else
/// IrrationalWithin(Q).
AngleClass classify_angle(double omega, std::int64_t Q, double tol = 1e-12);

/// q(x) = q0 + q1 x1 + q2 x2.
struct LinearIndex {
  cplx q0{1.0, 0.0};
  cplx q1{0.0, 0.0};
  cplx q2{0.0, 0.0};

  static LinearIndex constant(cplx c) { return {c, 0.0, 0.0}; }
  cplx operator()(const Vec2& x) const { return q0 + q1 * x.x + q2 * x.y; }
  bool is_constant() const { return q1 == cplx{} && q2 == cplx{}; }
};

struct Polygon {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices[i]; }
  const Vec2& next(std::size_t i) const { return vertices[(i + 1) % size()]; }
  const Vec2& prev(std::size_t i) const { return vertices[(i + size() - 1) % size()]; }

  double signed_area() const;
  double diameter() const;
  Vec2 centroid() const;
  bool is_ccw() const { return signed_area() > 0.0; }
  /// Strict convexity: every turn is a left turn.
  bool is_convex() const;
  /// Interior angle at vertex i, in (0, 2pi) for a simple CCW polygon.
  double interior_angle(std::size_t i) const;
  /// Closed containment for convex CCW polygons.
  bool contains(const Vec2& p, double eps = 0.0) const;
  double boundary_distance(const Vec2& p) const;

  static Polygon regular(int n, double radius, Vec2 centre = {}, double phase = 0.0);
  static Polygon square(double side, Vec2 centre = {});
};

/// x_global = R(angle) x_local + translation.
struct RigidMotion {
  double angle = 0.0;
  Vec2 translation{};

  Vec2 apply(const Vec2& local) const;
  Vec2 inverse(const Vec2& global) const;
};

struct Corner {
  Sector sector;
  RigidMotion to_global;
};

/// Sector of radius r0 at polygon vertex `vertex_index`, in a frame with the vertex at
/// the origin. The first boundary ray points along the edge to the next vertex.
Corner corner_at_vertex(const Polygon& polygon, std::size_t vertex_index, double r0);

/// Layers Sigma_1 > Sigma_2 > ... ; indices[i] lives on Sigma_i \ Sigma_{i+1} and
/// etas[i] on the boundary of Sigma_i.
struct NestScatterer {
  std::vector<Polygon> layers;
  std::vector<LinearIndex> indices;
  std::vector<cplx> etas;
};

/// Convex cells partitioning Omega; one conductive constant on every cell edge.
struct CellScatterer {
  std::vector<Polygon> cells;
  cplx eta{0.0, 0.0};
  std::vector<LinearIndex> indices;
};

struct Violation {
  std::string clause;
  std::string detail;
};

std::vector<Violation> validate_structure(const NestScatterer& s);
std::vector<Violation> validate_structure(const CellScatterer& s);

/// Relative separation required between consecutive nest boundaries.
inline constexpr double kNestSeparation = 1e-9;

/// Edge pieces of a cell layout after splitting at T-junctions.
struct CellEdge {
  Vec2 a, b;
  int cell = -1;       // owning cell (first owner for shared edges)
  int other = -1;      // neighbouring cell or -1 on the outer boundary
};
std::vector<CellEdge> cell_edges(const CellScatterer& s, double eps = 1e-10);

}  // namespace condscat::geometry

#endif  // CONDSCAT_GEOMETRY_HPP_
