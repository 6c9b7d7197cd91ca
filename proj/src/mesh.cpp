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

#include "condscat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_set>

namespace condscat::fem {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> nb{-1, -1, -1};    // neighbour across the edge opposite v[i]
  std::array<bool, 3> cons{false, false, false};
  bool alive = true;
  Vec2 cc;
  double r2 = 0.0;
};

std::pair<int, int> key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

// Incremental constrained Delaunay triangulation (Bowyer-Watson with blocked cavities).
class Triangulator {
 public:
  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> vtri;

  explicit Triangulator(double extent) {
    const double R = 20.0 * extent;
    for (int i = 0; i < 3; ++i) {
      const double a = kPi / 2 + 2 * kPi * i / 3;
      add_point({R * std::cos(a), R * std::sin(a)});
    }
    Tri t;
    t.v = {0, 1, 2};
    set_cc(t);
    tris.push_back(t);
    vtri = {0, 0, 0};
  }

  bool is_super(int v) const { return v < 3; }

  int add_point(const Vec2& p) {
    pts.push_back(p);
    vtri.push_back(-1);
    return static_cast<int>(pts.size()) - 1;
  }

  void set_cc(Tri& t) const {
    const Vec2 a = pts[t.v[0]], b = pts[t.v[1]], c = pts[t.v[2]];
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double lab = dot(ab, ab), lac = dot(ac, ac);
    const Vec2 off{(ac.y * lab - ab.y * lac) / d, (ab.x * lac - ac.x * lab) / d};
    t.cc = a + off;
    t.r2 = dot(off, off);
  }

  bool in_circle(const Tri& t, const Vec2& p) const {
    const Vec2 d = p - t.cc;
    return dot(d, d) < t.r2 * (1.0 - 1e-12);
  }

  // Strictly right of a->b, up to rounding relative to |ab|^2.
  static bool right_of(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    return orient(a, b, p) < -1e-13 * dot(ab, ab);
  }

  bool contains(const Tri& t, const Vec2& p) const {
    for (int i = 0; i < 3; ++i)
      if (right_of(pts[t.v[(i + 1) % 3]], pts[t.v[(i + 2) % 3]], p)) return false;
    return true;
  }

  int brute_locate(const Vec2& p) const {
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (tris[t].alive && contains(tris[t], p)) return static_cast<int>(t);
    throw SolverError("mesh generation: point outside the triangulation");
  }

  struct WalkResult {
    int tri = -1;
    int blocked_tri = -1;  // set when the straight path crosses a constrained edge
    int blocked_edge = -1;
  };

  // Straight-line walk from the centroid of `start` to p.
  WalkResult walk(int start, const Vec2& p, bool stop_at_constraints) const {
    int t = start;
    const auto centroid = [&](int k) {
      const Tri& T = tris[k];
      return (pts[T.v[0]] + pts[T.v[1]] + pts[T.v[2]]) * (1.0 / 3.0);
    };
    const Vec2 o = centroid(start);
    for (std::size_t step = 0; step < 4 * tris.size() + 100; ++step) {
      const Tri& T = tris[t];
      int exit = -1;
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts[T.v[(i + 1) % 3]], b = pts[T.v[(i + 2) % 3]];
        if (!right_of(a, b, p)) continue;
        const double sa = orient(o, p, a), sb = orient(o, p, b);
        if ((sa <= 0 && sb >= 0) || (sa >= 0 && sb <= 0)) {
          exit = i;
          break;
        }
        if (exit < 0) exit = i;
      }
      if (exit < 0) return {t, -1, -1};
      if (stop_at_constraints && T.cons[exit]) return {-1, t, exit};
      if (T.nb[exit] < 0) break;
      t = T.nb[exit];
    }
    return {brute_locate(p), -1, -1};
  }

  // Cavity of p (triangles whose circumcircle contains p, not crossing constraints),
  // trimmed so that every boundary edge sees p strictly on its left.
  std::vector<int> cavity(const Vec2& p, int seed, int forced) const {
    std::vector<int> cav{seed};
    std::unordered_set<int> in{seed};
    if (forced >= 0) {
      cav.push_back(forced);
      in.insert(forced);
    }
    for (std::size_t k = 0; k < cav.size(); ++k) {
      const Tri& T = tris[cav[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = T.nb[i];
        if (n < 0 || in.count(n) || T.cons[i]) continue;
        if (in_circle(tris[n], p)) {
          in.insert(n);
          cav.push_back(n);
        }
      }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = 0; k < cav.size(); ++k) {
        const int t = cav[k];
        const Tri& T = tris[t];
        for (int i = 0; i < 3; ++i) {
          if (T.nb[i] >= 0 && in.count(T.nb[i])) continue;
          const Vec2 a = pts[T.v[(i + 1) % 3]], b = pts[T.v[(i + 2) % 3]];
          const Vec2 ab = b - a;
          if (orient(a, b, p) > 1e-13 * dot(ab, ab)) continue;
          if (t == seed || t == forced) {
            // p sits on this edge: the triangle beyond must join the cavity.
            const int n = T.nb[i];
            if (n < 0 || T.cons[i]) throw SolverError("mesh generation: point on a constrained edge");
            in.insert(n);
            cav.push_back(n);
          } else {
            in.erase(t);
            cav.erase(cav.begin() + static_cast<std::ptrdiff_t>(k));
          }
          changed = true;
          break;
        }
        if (changed) break;
      }
    }
    return cav;
  }

  // Replaces the cavity by the fan around p. Returns the new triangles.
  std::vector<int> fill(int pi, const std::vector<int>& cav) {
    std::unordered_set<int> in(cav.begin(), cav.end());
    struct Bnd {
      int a, b, outside;
      bool cons;
    };
    std::vector<Bnd> bnd;
    for (int t : cav) {
      const Tri& T = tris[t];
      for (int i = 0; i < 3; ++i)
        if (T.nb[i] < 0 || !in.count(T.nb[i])) bnd.push_back({T.v[(i + 1) % 3], T.v[(i + 2) % 3], T.nb[i], T.cons[i]});
    }
    std::vector<int> slots(cav.begin(), cav.end());
    for (int t : cav) tris[t].alive = false;
    std::vector<int> made;
    std::vector<std::pair<int, int>> start, end;  // vertex -> new triangle
    for (const Bnd& e : bnd) {
      int id;
      if (!slots.empty()) {
        id = slots.back();
        slots.pop_back();
      } else {
        id = static_cast<int>(tris.size());
        tris.emplace_back();
      }
      Tri T;
      T.v = {e.a, e.b, pi};
      T.nb = {-1, -1, e.outside};
      T.cons = {false, false, e.cons};
      set_cc(T);
      tris[id] = T;
      if (e.outside >= 0) {
        Tri& O = tris[e.outside];
        for (int j = 0; j < 3; ++j)
          if (O.v[(j + 1) % 3] == e.b && O.v[(j + 2) % 3] == e.a) O.nb[j] = id;
      }
      start.push_back({e.a, id});
      end.push_back({e.b, id});
      made.push_back(id);
    }
    const auto find = [](const std::vector<std::pair<int, int>>& m, int v) {
      for (const auto& [k, t] : m)
        if (k == v) return t;
      throw SolverError("mesh generation: cavity boundary is not a closed loop");
    };
    for (int id : made) {
      Tri& T = tris[id];
      T.nb[0] = find(start, T.v[1]);
      T.nb[1] = find(end, T.v[0]);
      for (int v : T.v) vtri[v] = id;
    }
    return made;
  }

  std::vector<int> insert(const Vec2& p, int hint) {
    const int pi = add_point(p);
    const auto w = walk(hint, p, false);
    return fill(pi, cavity(p, w.tri, -1));
  }

  // Triangle and local edge index of edge (a, b), or {-1, -1}.
  std::pair<int, int> find_edge(int a, int b) const {
    const auto check = [&](int t) -> int {
      const Tri& T = tris[t];
      for (int i = 0; i < 3; ++i) {
        const int x = T.v[(i + 1) % 3], y = T.v[(i + 2) % 3];
        if ((x == a && y == b) || (x == b && y == a)) return i;
      }
      return -1;
    };
    int t0 = vtri[a];
    if (t0 < 0 || !tris[t0].alive || std::find(tris[t0].v.begin(), tris[t0].v.end(), a) == tris[t0].v.end()) {
      t0 = -1;
      for (std::size_t t = 0; t < tris.size() && t0 < 0; ++t)
        if (tris[t].alive && std::find(tris[t].v.begin(), tris[t].v.end(), a) != tris[t].v.end()) t0 = static_cast<int>(t);
      if (t0 < 0) return {-1, -1};
    }
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      for (int guard = 0; guard < 10000 && t >= 0; ++guard) {
        const int e = check(t);
        if (e >= 0) return {t, e};
        const Tri& T = tris[t];
        int ia = 0;
        while (T.v[ia] != a) ++ia;
        t = T.nb[dir == 0 ? (ia + 2) % 3 : (ia + 1) % 3];
        if (t == t0) break;
      }
    }
    return {-1, -1};
  }

  void set_constraint(int t, int e, bool on) {
    Tri& T = tris[t];
    T.cons[e] = on;
    const int n = T.nb[e];
    if (n < 0) return;
    const int a = T.v[(e + 1) % 3], b = T.v[(e + 2) % 3];
    Tri& N = tris[n];
    for (int j = 0; j < 3; ++j)
      if (N.v[(j + 1) % 3] == b && N.v[(j + 2) % 3] == a) N.cons[j] = on;
  }
};

class Mesher {
 public:
  Mesher(const Layout& layout, double Rt, double h)
      : layout_(layout), Rt_(Rt), h_(h), tr_(Rt) {
    Mt_ = std::max(16, static_cast<int>(std::ceil(2 * kPi * Rt / h)));
  }

  Mesh run() {
    place_boundary();
    recover_segments();
    refine();
    return extract();
  }

 private:
  const Layout& layout_;
  double Rt_, h_;
  Triangulator tr_;
  int Mt_ = 16;
  std::map<std::pair<int, int>, int> segs_;  // constrained piece -> tag
  std::map<std::pair<long long, long long>, int> node_of_;

  double size_at(const Vec2& x) const { return graded_size(layout_.grading_points, h_, x); }

  int node(const Vec2& p) {
    const auto k = std::make_pair(std::llround(p.x * 1e10), std::llround(p.y * 1e10));
    const auto it = node_of_.find(k);
    if (it != node_of_.end()) return it->second;
    const int id = tr_.add_point(p);
    node_of_[k] = id;
    return id;
  }

  void subdivide(const Vec2& a, const Vec2& b, int tag, std::vector<std::pair<Vec2, Vec2>>& out_pieces,
                 std::vector<int>& out_tags) {
    const Vec2 m = (a + b) * 0.5;
    const double len = dist(a, b);
    if (len <= std::min({size_at(a), size_at(b), size_at(m)})) {
      out_pieces.push_back({a, b});
      out_tags.push_back(tag);
      return;
    }
    subdivide(a, m, tag, out_pieces, out_tags);
    subdivide(m, b, tag, out_pieces, out_tags);
  }

  void place_boundary() {
    std::vector<std::pair<Vec2, Vec2>> pieces;
    std::vector<int> tags;
    for (int i = 0; i < Mt_; ++i) {
      const double a0 = 2 * kPi * i / Mt_, a1 = 2 * kPi * (i + 1) / Mt_;
      pieces.push_back({{Rt_ * std::cos(a0), Rt_ * std::sin(a0)}, {Rt_ * std::cos(a1), Rt_ * std::sin(a1)}});
      tags.push_back(kTruncationTag);
    }
    for (const auto& s : layout_.segments) subdivide(s.a, s.b, s.tag, pieces, tags);

    // Insert every node point, then record the pieces.
    std::vector<std::pair<int, int>> ids;
    const int before = static_cast<int>(tr_.pts.size());
    for (const auto& [a, b] : pieces) ids.push_back({node(a), node(b)});
    std::vector<Vec2> fresh(tr_.pts.begin() + before, tr_.pts.end());
    tr_.pts.resize(before);
    tr_.vtri.resize(before);
    int hint = 0;
    for (const Vec2& p : fresh) {
      const auto made = tr_.insert(p, hint);
      hint = made.front();
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (ids[i].first == ids[i].second) continue;
      segs_[key(ids[i].first, ids[i].second)] = tags[i];
    }
  }

  void recover_segments() {
    for (int round = 0; round < 60; ++round) {
      std::vector<std::pair<std::pair<int, int>, int>> missing;
      for (const auto& [k, tag] : segs_)
        if (tr_.find_edge(k.first, k.second).first < 0) missing.push_back({k, tag});
      if (missing.empty()) {
        for (const auto& [k, tag] : segs_) {
          const auto [t, e] = tr_.find_edge(k.first, k.second);
          tr_.set_constraint(t, e, true);
        }
        return;
      }
      for (const auto& [k, tag] : missing) {
        const Vec2 m = (tr_.pts[k.first] + tr_.pts[k.second]) * 0.5;
        const int hint = tr_.vtri[k.first] >= 0 && tr_.tris[tr_.vtri[k.first]].alive ? tr_.vtri[k.first] : 0;
        tr_.insert(m, hint);
        const int mi = static_cast<int>(tr_.pts.size()) - 1;
        segs_.erase(k);
        segs_[key(k.first, mi)] = tag;
        segs_[key(mi, k.second)] = tag;
      }
    }
    throw SolverError("mesh generation: interface edges could not be recovered");
  }

  bool inside_domain(const Vec2& c) const {
    const double r = norm(c);
    if (r < Rt_ * std::cos(kPi / Mt_)) return true;
    if (r >= Rt_) return false;
    const double step = 2 * kPi / Mt_;
    double a = std::atan2(c.y, c.x);
    if (a < 0) a += 2 * kPi;
    const int i = static_cast<int>(a / step);
    const Vec2 p{Rt_ * std::cos(i * step), Rt_ * std::sin(i * step)};
    const Vec2 q{Rt_ * std::cos((i + 1) * step), Rt_ * std::sin((i + 1) * step)};
    return orient(p, q, c) > 0;
  }

  // Splits a constrained edge at its midpoint. Returns the new triangles, or empty when
  // the piece is already at the size floor.
  std::vector<int> split_segment(int t, int e) {
    const Tri& T = tr_.tris[t];
    const int a = T.v[(e + 1) % 3], b = T.v[(e + 2) % 3];
    const Vec2 pa = tr_.pts[a], pb = tr_.pts[b];
    if (dist(pa, pb) < 0.5 * h_ * h_) return {};
    const auto it = segs_.find(key(a, b));
    const int tag = it == segs_.end() ? kTruncationTag : it->second;
    const int n = T.nb[e];
    tr_.set_constraint(t, e, false);
    const Vec2 m = (pa + pb) * 0.5;
    const int mi = tr_.add_point(m);
    const auto made = tr_.fill(mi, tr_.cavity(m, t, n));
    segs_.erase(key(a, b));
    for (int end : {a, b}) {
      segs_[key(end, mi)] = tag;
      const auto [tt, ee] = tr_.find_edge(end, mi);
      if (tt < 0) throw SolverError("mesh generation: lost a split interface piece");
      tr_.set_constraint(tt, ee, true);
    }
    return made;
  }

  bool is_bad(const Tri& T) const {
    for (int v : T.v)
      if (tr_.is_super(v)) return false;
    const Vec2 a = tr_.pts[T.v[0]], b = tr_.pts[T.v[1]], c = tr_.pts[T.v[2]];
    const Vec2 g = (a + b + c) * (1.0 / 3.0);
    if (!inside_domain(g)) return false;
    const double r = std::sqrt(T.r2);
    // Margin for the outward move of split truncation nodes.
    const double s = size_at(g) * (norm(g) > Rt_ - 2 * h_ ? 0.95 : 1.0);
    const double lmin = std::min({dist(a, b), dist(b, c), dist(c, a)});
    const double lmax = std::max({dist(a, b), dist(b, c), dist(c, a)});
    if (r > 0.62 * s || lmax > s) return true;
    return lmin > h_ * h_ && r > 1.45 * lmin;
  }

  void refine() {
    std::deque<int> queue;
    for (std::size_t t = 0; t < tr_.tris.size(); ++t) queue.push_back(static_cast<int>(t));
    const std::size_t max_points = 4000000;
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      if (!tr_.tris[t].alive || !is_bad(tr_.tris[t])) continue;
      if (tr_.pts.size() > max_points) throw SolverError("mesh generation: node budget exceeded");
      const Tri T = tr_.tris[t];
      const Vec2 cc = T.cc;
      std::vector<int> made;
      const auto w = tr_.walk(t, cc, true);
      if (w.tri < 0) {
        made = split_segment(w.blocked_tri, w.blocked_edge);
      } else {
        const auto cav = tr_.cavity(cc, w.tri, -1);
        int enc_t = -1, enc_e = -1;
        std::unordered_set<int> in(cav.begin(), cav.end());
        for (int c : cav) {
          const Tri& C = tr_.tris[c];
          for (int i = 0; i < 3 && enc_t < 0; ++i) {
            if (!C.cons[i]) continue;
            const Vec2 a = tr_.pts[C.v[(i + 1) % 3]], b = tr_.pts[C.v[(i + 2) % 3]];
            if (dist(cc, (a + b) * 0.5) < 0.5 * dist(a, b)) {
              enc_t = c;
              enc_e = i;
            }
          }
        }
        if (enc_t >= 0) {
          made = split_segment(enc_t, enc_e);
        } else {
          const int pi = tr_.add_point(cc);
          made = tr_.fill(pi, cav);
        }
      }
      for (int m : made) queue.push_back(m);
      if (!made.empty() && tr_.tris[t].alive) queue.push_back(t);
    }
  }

  Mesh extract() {
    const int nt = static_cast<int>(tr_.tris.size());
    std::vector<char> outside(nt, 0);
    std::vector<int> stack;
    for (int t = 0; t < nt; ++t) {
      if (!tr_.tris[t].alive) continue;
      for (int v : tr_.tris[t].v)
        if (tr_.is_super(v)) {
          outside[t] = 1;
          stack.push_back(t);
          break;
        }
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const Tri& T = tr_.tris[t];
      for (int i = 0; i < 3; ++i) {
        const int n = T.nb[i];
        if (n < 0 || outside[n] || T.cons[i]) continue;
        outside[n] = 1;
        stack.push_back(n);
      }
    }
    Mesh mesh;
    mesh.h = h_;
    mesh.Rt = Rt_;
    mesh.interface_count = static_cast<int>(layout_.tag_eta.size());
    std::vector<int> remap(tr_.pts.size(), -1);
    std::vector<int> tri_id(nt, -1);
    for (int t = 0; t < nt; ++t) {
      if (!tr_.tris[t].alive || outside[t]) continue;
      std::array<int, 3> v{};
      for (int i = 0; i < 3; ++i) {
        int& r = remap[tr_.tris[t].v[i]];
        if (r < 0) {
          r = static_cast<int>(mesh.nodes.size());
          mesh.nodes.push_back(tr_.pts[tr_.tris[t].v[i]]);
        }
        v[i] = r;
      }
      tri_id[t] = static_cast<int>(mesh.triangles.size());
      mesh.triangles.push_back(v);
      const Vec2 g = (mesh.nodes[v[0]] + mesh.nodes[v[1]] + mesh.nodes[v[2]]) * (1.0 / 3.0);
      mesh.region.push_back(layout_.region_of(g));
    }
    for (int t = 0; t < nt; ++t) {
      if (tri_id[t] < 0) continue;
      const Tri& T = tr_.tris[t];
      for (int i = 0; i < 3; ++i) {
        if (!T.cons[i]) continue;
        const int n = T.nb[i];
        if (n >= 0 && tri_id[n] >= 0 && n < t) continue;
        const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
        const auto it = segs_.find(key(a, b));
        if (it == segs_.end()) throw SolverError("mesh generation: untagged constrained edge");
        mesh.edges.push_back({remap[a], remap[b], it->second});
      }
    }
    std::vector<int> bn;
    for (const auto& e : mesh.edges)
      if (e.tag == kTruncationTag) bn.insert(bn.end(), {e.a, e.b});
    std::sort(bn.begin(), bn.end());
    bn.erase(std::unique(bn.begin(), bn.end()), bn.end());
    const auto ang = [&](int i) {
      const double a = std::atan2(mesh.nodes[i].y, mesh.nodes[i].x);
      return a < 0 ? a + 2 * kPi : a;
    };
    std::sort(bn.begin(), bn.end(), [&](int a, int b) { return ang(a) < ang(b); });
    mesh.boundary = bn;
    // Nodes added on truncation chords move onto the circle.
    for (int i : bn) mesh.nodes[i] = mesh.nodes[i] * (Rt_ / norm(mesh.nodes[i]));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      if (!(mesh.triangle_area(t) > 0)) throw SolverError("mesh generation: inverted triangle");
    return mesh;
  }
};

}  // namespace

double graded_size(const std::vector<Vec2>& grading_points, double h, const Vec2& x) {
  if (grading_points.empty()) return h;
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& p : grading_points) d = std::min(d, dist(p, x));
  return std::clamp(h * std::sqrt(d), h * h, h);
}

double Mesh::triangle_area(std::size_t t) const {
  const auto& v = triangles[t];
  return 0.5 * orient(nodes[v[0]], nodes[v[1]], nodes[v[2]]);
}

double Mesh::triangle_diameter(std::size_t t) const {
  const auto& v = triangles[t];
  return std::max({dist(nodes[v[0]], nodes[v[1]]), dist(nodes[v[1]], nodes[v[2]]), dist(nodes[v[2]], nodes[v[0]])});
}

Layout make_layout(const Scatterer& s, double h) {
  validate(s);
  Layout L;
  L.radius = circumradius(s);
  if (const auto* n = std::get_if<geometry::NestScatterer>(&s)) {
    for (std::size_t i = 0; i < n->layers.size(); ++i) {
      const auto& p = n->layers[i];
      for (std::size_t j = 0; j < p.size(); ++j) L.segments.push_back({p[j], p.next(j), static_cast<int>(i)});
      L.tag_eta.push_back(n->etas[i]);
    }
    L.grading_points = corners(s);
    L.region_index = n->indices;
    const auto layers = n->layers;
    L.region_of = [layers](const Vec2& x) {
      for (std::size_t i = layers.size(); i-- > 0;)
        if (layers[i].contains(x)) return static_cast<int>(i);
      return -1;
    };
  } else if (const auto* c = std::get_if<geometry::CellScatterer>(&s)) {
    const auto pieces = geometry::cell_edges(*c);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      L.segments.push_back({pieces[i].a, pieces[i].b, static_cast<int>(i)});
      L.tag_eta.push_back(c->eta);
    }
    L.grading_points = corners(s);
    L.region_index = c->indices;
    const auto cells = c->cells;
    L.region_of = [cells](const Vec2& x) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].contains(x)) return static_cast<int>(i);
      return -1;
    };
  } else {
    const auto& d = std::get<disk::DiskScatterer>(s);
    std::vector<geometry::Polygon> polys;
    for (std::size_t j = 0; j < d.radii.size(); ++j) {
      const int M = std::max(24, static_cast<int>(std::ceil(2 * kPi * d.radii[j] / (0.5 * h))));
      polys.push_back(geometry::Polygon::regular(M, d.radii[j]));
      const auto& p = polys.back();
      for (std::size_t i = 0; i < p.size(); ++i) L.segments.push_back({p[i], p.next(i), static_cast<int>(j)});
      L.tag_eta.push_back(d.etas[j]);
      L.region_index.push_back(geometry::LinearIndex::constant(d.q_values[j]));
    }
    L.region_of = [polys](const Vec2& x) {
      for (std::size_t i = polys.size(); i-- > 0;)
        if (polys[i].contains(x)) return static_cast<int>(i);
      return -1;
    };
  }
  return L;
}

Mesh mesh_layout(const Layout& layout, double Rt, double h, double k) {
  if (!(h > 0.0) || !(Rt > 0.0)) throw DomainError("mesh size and truncation radius must be positive");
  if (!(h < 1.0)) throw DomainError("mesh size must be below 1 for the h^2 grading floor");
  if (layout.radius > 0.8 * Rt) throw DomainError("scatterer does not fit in the ball of radius 0.8 Rt");
  if (k > 0.0 && h > 2 * kPi / k / 10.0)
    throw DomainError("h = " + std::to_string(h) + " is coarser than a tenth of the wavelength");
  return Mesher(layout, Rt, h).run();
}

Mesh mesh_scatterer(const Scatterer& s, double Rt, double h, double k) {
  return mesh_layout(make_layout(s, h), Rt, h, k);
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  os << "condscat-mesh 1\n";
  os << "nodes " << mesh.nodes.size() << "\n";
  for (const Vec2& p : mesh.nodes) os << p.x << " " << p.y << "\n";
  os << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t];
    os << v[0] << " " << v[1] << " " << v[2] << " " << mesh.region[t] << "\n";
  }
  os << "edges " << mesh.edges.size() << "\n";
  for (const auto& e : mesh.edges) os << e.a << " " << e.b << " " << e.tag << "\n";
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  double x1 = -1e300, y1 = -1e300;
  x0_ = y0_ = 1e300;
  for (const Vec2& p : mesh.nodes) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double area = std::max((x1 - x0_) * (y1 - y0_), 1e-300);
  cell_ = std::sqrt(area / std::max<std::size_t>(mesh.triangles.size(), 1)) * 2.0;
  nx_ = std::max(1, static_cast<int>(std::ceil((x1 - x0_) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((y1 - y0_) / cell_)) + 1);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
    for (int v : mesh.triangles[t]) {
      bx0 = std::min(bx0, mesh.nodes[v].x);
      by0 = std::min(by0, mesh.nodes[v].y);
      bx1 = std::max(bx1, mesh.nodes[v].x);
      by1 = std::max(by1, mesh.nodes[v].y);
    }
    const int i0 = static_cast<int>((bx0 - x0_) / cell_), i1 = static_cast<int>((bx1 - x0_) / cell_);
    const int j0 = static_cast<int>((by0 - y0_) / cell_), j1 = static_cast<int>((by1 - y0_) / cell_);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
  }
}

std::optional<std::pair<int, std::array<double, 3>>> MeshLocator::locate(const Vec2& x) const {
  const int i = static_cast<int>(std::floor((x.x - x0_) / cell_));
  const int j = static_cast<int>(std::floor((x.y - y0_) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  int best = -1;
  double best_min = -1e-10;
  std::array<double, 3> best_bary{};
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& v = mesh_->triangles[t];
    const Vec2 a = mesh_->nodes[v[0]], b = mesh_->nodes[v[1]], c = mesh_->nodes[v[2]];
    const double A = orient(a, b, c);
    const std::array<double, 3> l{orient(x, b, c) / A, orient(a, x, c) / A, orient(a, b, x) / A};
    const double m = std::min({l[0], l[1], l[2]});
    if (m > best_min) {
      best_min = m;
      best = t;
      best_bary = l;
    }
  }
  if (best < 0) return std::nullopt;
  return std::make_pair(best, best_bary);
}

}  // namespace condscat::fem
