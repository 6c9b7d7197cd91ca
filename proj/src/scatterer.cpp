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

#include "condscat/scatterer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace condscat {

using geometry::CellScatterer;
using geometry::LinearIndex;
using geometry::NestScatterer;
using geometry::Polygon;
using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInside = -1e-13;

json vertices_to_json(const Polygon& p) {
  json a = json::array();
  for (const Vec2& v : p.vertices) a.push_back({v.x, v.y});
  return a;
}

Polygon vertices_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() < 3) throw ConfigError(what + ": need at least three vertices");
  Polygon p;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(what + ": vertex must be [x, y]");
    p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return p;
}

json index_to_json(const LinearIndex& q) {
  if (q.is_constant()) return complex_to_json(q.q0);
  return {{"q0", complex_to_json(q.q0)}, {"q1", complex_to_json(q.q1)}, {"q2", complex_to_json(q.q2)}};
}

LinearIndex index_from_json(const json& j, const std::string& what) {
  if (j.is_object()) {
    LinearIndex q;
    for (const auto& [key, val] : j.items())
      if (key != "q0" && key != "q1" && key != "q2") throw ConfigError(what + ": unknown key '" + key + "'");
    q.q0 = j.contains("q0") ? complex_from_json(j["q0"], what + ".q0") : cplx{1.0};
    q.q1 = j.contains("q1") ? complex_from_json(j["q1"], what + ".q1") : cplx{};
    q.q2 = j.contains("q2") ? complex_from_json(j["q2"], what + ".q2") : cplx{};
    return q;
  }
  return LinearIndex::constant(complex_from_json(j, what));
}

const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  return j[key];
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [key, val] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(what + ": unknown key '" + key + "'");
  }
}

std::string join_violations(const std::vector<geometry::Violation>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x.clause + ": " + x.detail;
  return s;
}

}  // namespace

cplx complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(what + ": expected a number or [re, im]");
}

json complex_to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return {z.real(), z.imag()};
}

std::string kind_name(const Scatterer& s) {
  return std::visit(Overloaded{[](const NestScatterer&) { return std::string("nest"); },
                               [](const CellScatterer&) { return std::string("cell"); },
                               [](const disk::DiskScatterer&) { return std::string("disk"); }},
                    s);
}

void validate(const Scatterer& s) {
  std::visit(Overloaded{[](const NestScatterer& n) {
                          const auto v = geometry::validate_structure(n);
                          if (!v.empty()) throw DomainError("invalid nest scatterer: " + join_violations(v));
                        },
                        [](const CellScatterer& c) {
                          const auto v = geometry::validate_structure(c);
                          if (!v.empty()) throw DomainError("invalid cell scatterer: " + join_violations(v));
                        },
                        [](const disk::DiskScatterer& d) { d.validate(); }},
             s);
}

double circumradius(const Scatterer& s) {
  double r = 0.0;
  for (const Vec2& v : corners(s)) r = std::max(r, norm(v));
  if (const auto* d = std::get_if<disk::DiskScatterer>(&s)) r = d->radii.at(0);
  return r;
}

std::vector<Vec2> corners(const Scatterer& s) {
  std::vector<Vec2> out;
  std::visit(Overloaded{[&](const NestScatterer& n) {
                          for (const auto& p : n.layers) out.insert(out.end(), p.vertices.begin(), p.vertices.end());
                        },
                        [&](const CellScatterer& c) {
                          for (const auto& p : c.cells)
                            for (const Vec2& v : p.vertices)
                              if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
                        },
                        [](const disk::DiskScatterer&) {}},
             s);
  return out;
}

cplx index_at(const Scatterer& s, const Vec2& x) {
  return std::visit(Overloaded{[&](const NestScatterer& n) -> cplx {
                                 for (std::size_t i = n.layers.size(); i-- > 0;)
                                   if (n.layers[i].contains(x, kInside)) return n.indices[i](x);
                                 return 1.0;
                               },
                               [&](const CellScatterer& c) -> cplx {
                                 for (std::size_t i = 0; i < c.cells.size(); ++i)
                                   if (c.cells[i].contains(x, kInside)) return c.indices[i](x);
                                 return 1.0;
                               },
                               [&](const disk::DiskScatterer& d) -> cplx {
                                 const double r = norm(x);
                                 for (std::size_t i = d.radii.size(); i-- > 0;)
                                   if (r < d.radii[i]) return d.q_values[i];
                                 return 1.0;
                               }},
                    s);
}

bool is_empty(const Scatterer& s) {
  const auto unit = [](const LinearIndex& q) { return q.is_constant() && q.q0 == cplx{1.0}; };
  return std::visit(Overloaded{[&](const NestScatterer& n) {
                                 for (const auto& q : n.indices)
                                   if (!unit(q)) return false;
                                 for (cplx e : n.etas)
                                   if (e != cplx{}) return false;
                                 return true;
                               },
                               [&](const CellScatterer& c) {
                                 for (const auto& q : c.indices)
                                   if (!unit(q)) return false;
                                 return c.eta == cplx{};
                               },
                               [](const disk::DiskScatterer& d) {
                                 for (cplx q : d.q_values)
                                   if (q != cplx{1.0}) return false;
                                 for (cplx e : d.etas)
                                   if (e != cplx{}) return false;
                                 return true;
                               }},
                    s);
}

json scatterer_to_json(const Scatterer& s) {
  return std::visit(Overloaded{[](const NestScatterer& n) {
                                 json layers = json::array();
                                 for (std::size_t i = 0; i < n.layers.size(); ++i)
                                   layers.push_back({{"vertices", vertices_to_json(n.layers[i])},
                                                     {"q", index_to_json(n.indices.at(i))},
                                                     {"eta", complex_to_json(n.etas.at(i))}});
                                 return json{{"type", "nest"}, {"layers", layers}};
                               },
                               [](const CellScatterer& c) {
                                 json cells = json::array();
                                 for (std::size_t i = 0; i < c.cells.size(); ++i)
                                   cells.push_back({{"vertices", vertices_to_json(c.cells[i])},
                                                    {"q", index_to_json(c.indices.at(i))}});
                                 return json{{"type", "cell"}, {"eta", complex_to_json(c.eta)}, {"cells", cells}};
                               },
                               [](const disk::DiskScatterer& d) {
                                 json layers = json::array();
                                 for (std::size_t i = 0; i < d.radii.size(); ++i)
                                   layers.push_back({{"radius", d.radii[i]},
                                                     {"q", complex_to_json(d.q_values.at(i))},
                                                     {"eta", complex_to_json(d.etas.at(i))}});
                                 return json{{"type", "disk"}, {"layers", layers}};
                               }},
                    s);
}

Scatterer scatterer_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scatterer: expected a JSON object");
  const json& type = field(j, "type", "scatterer");
  if (!type.is_string()) throw ConfigError("scatterer.type: expected a string");
  const std::string t = type.get<std::string>();
  Scatterer out;
  if (t == "nest") {
    check_keys(j, {"type", "layers"}, "scatterer");
    const json& layers = field(j, "layers", "scatterer");
    if (!layers.is_array() || layers.empty()) throw ConfigError("scatterer.layers: expected a non-empty array");
    NestScatterer n;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string w = "scatterer.layers[" + std::to_string(i) + "]";
      check_keys(layers[i], {"vertices", "q", "eta"}, w);
      n.layers.push_back(vertices_from_json(field(layers[i], "vertices", w), w + ".vertices"));
      n.indices.push_back(index_from_json(field(layers[i], "q", w), w + ".q"));
      n.etas.push_back(complex_from_json(field(layers[i], "eta", w), w + ".eta"));
    }
    out = n;
  } else if (t == "cell") {
    check_keys(j, {"type", "cells", "eta"}, "scatterer");
    const json& cells = field(j, "cells", "scatterer");
    if (!cells.is_array() || cells.empty()) throw ConfigError("scatterer.cells: expected a non-empty array");
    CellScatterer c;
    c.eta = complex_from_json(field(j, "eta", "scatterer"), "scatterer.eta");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string w = "scatterer.cells[" + std::to_string(i) + "]";
      check_keys(cells[i], {"vertices", "q"}, w);
      c.cells.push_back(vertices_from_json(field(cells[i], "vertices", w), w + ".vertices"));
      c.indices.push_back(index_from_json(field(cells[i], "q", w), w + ".q"));
    }
    out = c;
  } else if (t == "disk") {
    check_keys(j, {"type", "layers"}, "scatterer");
    const json& layers = field(j, "layers", "scatterer");
    if (!layers.is_array() || layers.empty()) throw ConfigError("scatterer.layers: expected a non-empty array");
    disk::DiskScatterer d;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string w = "scatterer.layers[" + std::to_string(i) + "]";
      check_keys(layers[i], {"radius", "q", "eta"}, w);
      const json& r = field(layers[i], "radius", w);
      if (!r.is_number()) throw ConfigError(w + ".radius: expected a number");
      d.radii.push_back(r.get<double>());
      d.q_values.push_back(complex_from_json(field(layers[i], "q", w), w + ".q"));
      d.etas.push_back(complex_from_json(field(layers[i], "eta", w), w + ".eta"));
    }
    out = d;
  } else {
    throw ConfigError("scatterer.type: expected nest, cell or disk, got '" + t + "'");
  }
  try {
    validate(out);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

Scatterer load_scatterer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scatterer file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scatterer file '" + path + "' is not valid JSON: " + e.what());
  }
  return scatterer_from_json(j);
}

void save_scatterer(const std::string& path, const Scatterer& s) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << scatterer_to_json(s).dump(2) << "\n";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t scatterer_hash(const Scatterer& s) { return fnv1a(scatterer_to_json(s).dump()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace condscat
