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

//! \file mesh.hpp
//! Conforming triangulation of the truncated domain |x| < Rt with interfaces resolved by
//! mesh edges, graded towards polygon vertices.

#ifndef CONDSCAT_MESH_HPP_
#define CONDSCAT_MESH_HPP_

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "condscat/common.hpp"
#include "condscat/geometry.hpp"
#include "condscat/scatterer.hpp"

namespace condscat::fem {

/// Edge tag of the truncation circle.
inline constexpr int kTruncationTag = -1;

/// Scatterer reduced to straight interface pieces and a region map.
struct Layout {
  struct Segment {
    Vec2 a, b;
    int tag = 0;
  };
  std::vector<Segment> segments;
  std::vector<cplx> tag_eta;               // eta per interface tag
  std::vector<Vec2> grading_points;        // polygon vertices
  std::vector<geometry::LinearIndex> region_index;
  std::function<int(const Vec2&)> region_of;  // -1 for the background
  double radius = 0.0;                     // circumradius of the scatterer
};

/// Disks become regular polygons with chords no longer than h / 2.
Layout make_layout(const Scatterer& s, double h);

struct Mesh {
  struct Edge {
    int a = 0, b = 0;
    int tag = 0;
  };
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> region;                    // per triangle, -1 = background
  std::vector<Edge> edges;                    // interface pieces and truncation chords
  std::vector<int> boundary;                  // truncation nodes sorted by angle
  double h = 0.0;
  double Rt = 0.0;
  int interface_count = 0;

  double triangle_area(std::size_t t) const;
  double triangle_diameter(std::size_t t) const;
};

/// Local target size clamp(h sqrt(d), h^2, h), d = distance to the nearest grading point.
double graded_size(const std::vector<Vec2>& grading_points, double h, const Vec2& x);

/// Throws DomainError if the scatterer does not fit in |x| < 0.8 Rt, or if k > 0 and h
/// exceeds a tenth of the wavelength 2 pi / k.
Mesh mesh_layout(const Layout& layout, double Rt, double h, double k = 0.0);
Mesh mesh_scatterer(const Scatterer& s, double Rt, double h, double k = 0.0);

/// Plain-text export:
///   condscat-mesh 1
///   nodes N        followed by N lines "x y"
///   triangles T    followed by T lines "a b c region"
///   edges E        followed by E lines "a b tag" (tag -1 = truncation circle)
void write_mesh(std::ostream& os, const Mesh& mesh);

/// Point location by uniform bucketing.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);
  /// Triangle containing x and its barycentric coordinates, or nullopt outside the mesh.
  std::optional<std::pair<int, std::array<double, 3>>> locate(const Vec2& x) const;

 private:
  const Mesh* mesh_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace condscat::fem

#endif  // CONDSCAT_MESH_HPP_
