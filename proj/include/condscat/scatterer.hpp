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

//! \file scatterer.hpp
//! Scatterer variant shared by the solvers, experiments and the command line, with its
//! JSON file schema:
//!
//!   {"type": "nest", "layers": [{"vertices": [[x, y], ...], "q": Q, "eta": C}, ...]}
//!   {"type": "cell", "eta": C, "cells": [{"vertices": [[x, y], ...], "q": Q}, ...]}
//!   {"type": "disk", "layers": [{"radius": R, "q": C, "eta": C}, ...]}
//!
//! C is a number or [re, im]; Q is C or {"q0": C, "q1": C, "q2": C}.

#ifndef CONDSCAT_SCATTERER_HPP_
#define CONDSCAT_SCATTERER_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "condscat/geometry.hpp"
#include "condscat/scatter_disk.hpp"
#include "json.hpp"

namespace condscat {

using Scatterer = std::variant<geometry::NestScatterer, geometry::CellScatterer, disk::DiskScatterer>;

std::string kind_name(const Scatterer& s);
/// Throws DomainError listing every violated clause.
void validate(const Scatterer& s);
/// Largest |x| over the scatterer.
double circumradius(const Scatterer& s);
/// Polygon vertices (none for disks).
std::vector<Vec2> corners(const Scatterer& s);
/// Refractive index at x (1 outside), using the exact geometry. Boundary points belong to
/// the outer side.
cplx index_at(const Scatterer& s, const Vec2& x);
/// True when q = 1 everywhere and every eta vanishes.
bool is_empty(const Scatterer& s);

nlohmann::json scatterer_to_json(const Scatterer& s);
/// Throws ConfigError naming the offending field.
Scatterer scatterer_from_json(const nlohmann::json& j);
Scatterer load_scatterer(const std::string& path);
void save_scatterer(const std::string& path, const Scatterer& s);

/// FNV-1a 64-bit hash of the compact JSON serialization.
std::uint64_t scatterer_hash(const Scatterer& s);
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

cplx complex_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json complex_to_json(cplx z);

}  // namespace condscat

#endif  // CONDSCAT_SCATTERER_HPP_
