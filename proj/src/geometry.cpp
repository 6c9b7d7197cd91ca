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

#include "condscat/geometry.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace condscat::geometry {

void Sector::validate() const {
  if (!(theta_m >= -kPi && theta_m < theta_M && theta_M < kPi))
    throw DomainError("sector angles must satisfy -pi <= theta_m < theta_M < pi");
  if (!(opening() < kPi)) throw DomainError("sector opening must lie in (0, pi)");
  if (!(r0 > 0.0)) throw DomainError("sector radius must be positive");
}

Sector Sector::centred(double bisector, double opening, double r0) {
  Sector s{bisector - 0.5 * opening, bisector + 0.5 * opening, r0};
  s.validate();
  return s;
}

std::string AngleClass::describe() const {
  std::ostringstream os;
  if (rational())
    os << "Rational(" << p << "/" << q << ")";
  else
    os << "IrrationalWithin(" << bound << ")";
  return os.str();
}

AngleClass classify_angle(double omega, std::int64_t Q, double tol) {
  if (!(omega > 0.0 && omega < 2.0 * kPi)) throw DomainError("angle must lie in (0, 2pi)");
  if (Q < 2) throw DomainError("denominator bound must be at least 2");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

  const long double x = static_cast<long double>(omega) / std::numbers::pi_v<long double>;
  AngleClass best;
  best.bound = Q;
  best.error = std::numeric_limits<double>::infinity();

  // Convergents h/k with h_{-1} = 1, k_{-1} = 0, h_{-2} = 0, k_{-2} = 1. Step n visits the
  // semiconvergents (h_{n-2} + j h_{n-1}) / (k_{n-2} + j k_{n-1}), j = 1..a_n, which come in
  // increasing denominator; j = a_n is the convergent itself.
  std::int64_t h2 = 0, k2 = 1, h1 = 1, k1 = 0;
  long double rem = x;
  for (int n = 0; n < 64; ++n) {
    const long double fl = std::floor(rem);
    const std::int64_t a =
        fl > static_cast<long double>(Q) ? Q + 1 : static_cast<std::int64_t>(fl);
    const std::int64_t jstart = n == 0 ? a : 1;
    for (std::int64_t j = jstart; j <= a; ++j) {
      const std::int64_t p = h2 + j * h1;
      const std::int64_t q = k2 + j * k1;
      if (q > Q) {
        best.kind = AngleClass::Kind::IrrationalWithin;
        return best;
      }
      if (p <= 0 || p >= 2 * q) continue;
      // The tolerance applies to the angle itself, in radians.
      const double err = static_cast<double>(
          std::abs(x - static_cast<long double>(p) / q) * std::numbers::pi_v<long double>);
      if (err < best.error) {
        best.error = err;
        best.p = p;
        best.q = q;
      }
      if (err < tol) {
        best.kind = AngleClass::Kind::Rational;
        return best;
      }
    }
    const std::int64_t h = a * h1 + h2;
    const std::int64_t k = a * k1 + k2;
    h2 = h1;
    k2 = k1;
    h1 = h;
    k1 = k;
    const long double frac = rem - fl;
    if (frac <= 0.0L || k1 > Q) break;
    rem = 1.0L / frac;
  }
  best.kind = AngleClass::Kind::IrrationalWithin;
  return best;
}

double Polygon::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < size(); ++i) a += cross(vertices[i], next(i));
  return 0.5 * a;
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, dist(vertices[i], vertices[j]));
  return d;
}

Vec2 Polygon::centroid() const {
  Vec2 c{};
  for (const auto& v : vertices) c = c + v;
  return size() ? c * (1.0 / static_cast<double>(size())) : c;
}

bool Polygon::is_convex() const {
  if (size() < 3) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (cross(vertices[i] - prev(i), next(i) - vertices[i]) <= 0.0) return false;
  return true;
}

double Polygon::interior_angle(std::size_t i) const {
  const Vec2 e1 = next(i) - vertices[i];
  const Vec2 e2 = prev(i) - vertices[i];
  double a = std::atan2(cross(e1, e2), dot(e1, e2));
  if (a <= 0.0) a += 2.0 * kPi;
  return a;
}

bool Polygon::contains(const Vec2& p, double eps) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec2 e = next(i) - vertices[i];
    const double len = norm(e);
    if (cross(e, p - vertices[i]) < -eps * len) return false;
  }
  return true;
}

double Polygon::boundary_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    d = std::min(d, segment_distance(p, vertices[i], next(i)));
  return d;
}

Polygon Polygon::regular(int n, double radius, Vec2 centre, double phase) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * kPi * i / n;
    p.vertices.push_back(centre + Vec2{radius * std::cos(t), radius * std::sin(t)});
  }
  return p;
}

Polygon Polygon::square(double side, Vec2 centre) {
  const double h = 0.5 * side;
  return Polygon{{centre + Vec2{-h, -h}, centre + Vec2{h, -h}, centre + Vec2{h, h},
                  centre + Vec2{-h, h}}};
}

Vec2 RigidMotion::apply(const Vec2& local) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return Vec2{c * local.x - s * local.y, s * local.x + c * local.y} + translation;
}

Vec2 RigidMotion::inverse(const Vec2& global) const {
  const Vec2 d = global - translation;
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Corner corner_at_vertex(const Polygon& polygon, std::size_t vertex_index, double r0) {
  const std::size_t n = polygon.size();
  if (n < 3) throw DomainError("polygon needs at least three vertices");
  if (vertex_index >= n) throw DomainError("vertex index out of range");
  if (!(r0 > 0.0)) throw DomainError("corner radius must be positive");
  const Vec2 v = polygon[vertex_index];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (i == vertex_index || j == vertex_index) continue;
    if (segment_distance(v, polygon[i], polygon[j]) <= r0)
      throw DomainError("corner radius too large: ball meets a non-incident edge");
  }
  const double beta = polygon.interior_angle(vertex_index);
  if (!(beta < kPi)) throw DomainError("vertex is not a convex corner");
  const Vec2 e1 = polygon.next(vertex_index) - v;
  double theta_m = std::atan2(e1.y, e1.x);
  RigidMotion motion{0.0, v};
  if (theta_m + beta >= kPi) {
    // Rotate the local frame so the first ray lies on the positive x1 axis.
    motion.angle = theta_m;
    theta_m = 0.0;
  }
  Sector s{theta_m, theta_m + beta, r0};
  s.validate();
  return {s, motion};
}

namespace {

double clip_intersection_area(const Polygon& a, const Polygon& b) {
  // Sutherland-Hodgman: clip a against every edge of convex CCW b.
  std::vector<Vec2> out = a.vertices;
  for (std::size_t i = 0; i < b.size() && !out.empty(); ++i) {
    const Vec2 p = b[i], q = b.next(i);
    const Vec2 e = q - p;
    std::vector<Vec2> in;
    in.swap(out);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Vec2 s = in[k], t = in[(k + 1) % in.size()];
      const double ds = cross(e, s - p), dt = cross(e, t - p);
      if (ds >= 0.0) out.push_back(s);
      if ((ds >= 0.0) != (dt >= 0.0)) out.push_back(s + (t - s) * (ds / (ds - dt)));
    }
  }
  return Polygon{out}.signed_area();
}

void check_polygon(const Polygon& p, const std::string& name, std::vector<Violation>& out) {
  if (p.size() < 3) {
    out.push_back({"polygon", name + " has fewer than three vertices"});
    return;
  }
  if (!p.is_ccw()) out.push_back({"orientation", name + " is not counterclockwise"});
  if (!p.is_convex()) out.push_back({"convexity", name + " is not strictly convex"});
}

}  // namespace

std::vector<Violation> validate_structure(const NestScatterer& s) {
  std::vector<Violation> out;
  if (s.layers.empty()) out.push_back({"layers", "nest has no layers"});
  if (s.indices.size() != s.layers.size())
    out.push_back({"indices", "one refractive index per layer is required"});
  if (s.etas.size() != s.layers.size())
    out.push_back({"etas", "one conductive constant per layer boundary is required"});
  for (std::size_t i = 0; i < s.layers.size(); ++i)
    check_polygon(s.layers[i], "layer " + std::to_string(i + 1), out);
  if (!out.empty() || s.layers.size() < 2) return out;

  const double gap = kNestSeparation * s.layers.front().diameter();
  for (std::size_t i = 0; i + 1 < s.layers.size(); ++i) {
    const Polygon& outer = s.layers[i];
    const Polygon& inner = s.layers[i + 1];
    for (const Vec2& v : inner.vertices) {
      if (!outer.contains(v) || outer.boundary_distance(v) < gap) {
        out.push_back({"nesting", "layer " + std::to_string(i + 2) +
                                      " is not compactly contained in layer " +
                                      std::to_string(i + 1)});
        break;
      }
    }
  }
  return out;
}

std::vector<CellEdge> cell_edges(const CellScatterer& s, double eps) {
  std::vector<CellEdge> pieces;
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const Polygon& cell = s.cells[c];
    for (std::size_t i = 0; i < cell.size(); ++i) {
      const Vec2 a = cell[i], b = cell.next(i);
      const Vec2 ab = b - a;
      const double len2 = dot(ab, ab);
      std::vector<double> cuts{0.0, 1.0};
      for (std::size_t o = 0; o < s.cells.size(); ++o) {
        if (o == c) continue;
        for (const Vec2& v : s.cells[o].vertices) {
          const double t = dot(v - a, ab) / len2;
          if (t > eps && t < 1.0 - eps && segment_distance(v, a, b) < eps) cuts.push_back(t);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] < eps) continue;
        const Vec2 pa = a + ab * cuts[k], pb = a + ab * cuts[k + 1];
        const Vec2 mid = (pa + pb) * 0.5;
        int other = -1;
        for (std::size_t o = 0; o < s.cells.size() && other < 0; ++o) {
          if (o == c) continue;
          if (s.cells[o].boundary_distance(mid) < eps) other = static_cast<int>(o);
        }
        // A shared piece is reported once, by the lower-numbered cell.
        if (other >= 0 && other < static_cast<int>(c)) continue;
        pieces.push_back({pa, pb, static_cast<int>(c), other});
      }
    }
  }
  return pieces;
}

std::vector<Violation> validate_structure(const CellScatterer& s) {
  std::vector<Violation> out;
  if (s.cells.empty()) out.push_back({"cells", "cell layout has no cells"});
  if (s.indices.size() != s.cells.size())
    out.push_back({"indices", "one refractive index per cell is required"});
  for (std::size_t i = 0; i < s.cells.size(); ++i)
    check_polygon(s.cells[i], "cell " + std::to_string(i + 1), out);
  if (!out.empty()) return out;

  double diam = 0.0, area_sum = 0.0;
  for (const auto& c : s.cells) {
    diam = std::max(diam, c.diameter());
    area_sum += c.signed_area();
  }
  const double eps = 1e-10 * diam;

  // (a) pairwise interior-disjoint
  for (std::size_t i = 0; i < s.cells.size(); ++i)
    for (std::size_t j = i + 1; j < s.cells.size(); ++j) {
      const double a = clip_intersection_area(s.cells[i], s.cells[j]);
      if (a > 1e-12 * diam * diam)
        out.push_back({"disjoint", "cells " + std::to_string(i + 1) + " and " +
                                       std::to_string(j + 1) + " overlap"});
    }
  if (!out.empty()) return out;

  // (b) the outer boundary is one closed loop enclosing exactly the union
  const auto pieces = cell_edges(s, eps);
  std::vector<CellEdge> outer;
  for (const auto& p : pieces)
    if (p.other < 0) outer.push_back(p);
  double loop_area = 0.0;
  for (const auto& p : outer) loop_area += 0.5 * cross(p.a, p.b);
  bool single_loop = !outer.empty();
  if (single_loop) {
    std::vector<bool> used(outer.size(), false);
    std::size_t cur = 0, visited = 0;
    used[0] = true;
    ++visited;
    while (true) {
      std::size_t nxt = outer.size();
      for (std::size_t k = 0; k < outer.size(); ++k)
        if (!used[k] && dist(outer[k].a, outer[cur].b) < eps) {
          nxt = k;
          break;
        }
      if (nxt == outer.size()) break;
      used[nxt] = true;
      ++visited;
      cur = nxt;
    }
    single_loop = visited == outer.size() && dist(outer[cur].b, outer[0].a) < eps;
  }
  if (!single_loop || std::abs(loop_area - area_sum) > 1e-9 * diam * diam)
    out.push_back({"union", "cells do not tile a simply connected domain"});

  // (c) every cell owns a vertex whose two edges lie on the outer boundary
  auto on_outer = [&](const Vec2& a, const Vec2& b) {
    for (const auto& p : pieces) {
      if (segment_distance(p.a, a, b) > eps || segment_distance(p.b, a, b) > eps) continue;
      if (p.other >= 0) return false;
    }
    return true;
  };
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const Polygon& cell = s.cells[c];
    bool found = false;
    for (std::size_t i = 0; i < cell.size() && !found; ++i)
      found = on_outer(cell[i], cell.next(i)) && on_outer(cell.prev(i), cell[i]);
    if (!found)
      out.push_back({"boundary-vertex", "cell " + std::to_string(c + 1) +
                                            " has no vertex with both edges on the outer "
                                            "boundary"});
  }
  return out;
}

}  // namespace condscat::geometry
