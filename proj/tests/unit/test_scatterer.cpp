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

#include <cstdio>
#include <filesystem>
#include <string>

#include "condscat/scatterer.hpp"
#include "doctest.h"

using namespace condscat;
using nlohmann::json;

namespace {

const char* kNest = R"({"type": "nest", "layers": [
  {"vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]], "q": 2, "eta": [0.5, 0.1]},
  {"vertices": [[-0.3, -0.3], [0.3, -0.3], [0, 0.4]], "q": {"q0": 3, "q1": 0.5, "q2": [0, 1]}, "eta": 0}]})";

const char* kCell = R"({"type": "cell", "eta": 0.7, "cells": [
  {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "q": 2},
  {"vertices": [[1, 0], [2, 0], [2, 1], [1, 1]], "q": 1.5}]})";

const char* kDisk = R"({"type": "disk", "layers": [{"radius": 1.5, "q": 2, "eta": 0.5},
  {"radius": 0.5, "q": [1, 0.2], "eta": -0.3}]})";

std::string config_error(const json& j) {
  try {
    scatterer_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("scatterer") {
  TEST_CASE("parse every kind") {
    const auto n = scatterer_from_json(json::parse(kNest));
    CHECK(kind_name(n) == "nest");
    const auto& nest = std::get<geometry::NestScatterer>(n);
    CHECK(nest.layers.size() == 2);
    CHECK(nest.etas[0] == cplx{0.5, 0.1});
    CHECK(nest.indices[1].q2 == cplx{0, 1});
    CHECK(index_at(n, {0.0, 0.0}) == cplx{3.0, 0.0});
    CHECK(index_at(n, {0.8, 0.0}) == cplx{2.0, 0.0});
    CHECK(index_at(n, {3.0, 0.0}) == cplx{1.0, 0.0});
    CHECK(circumradius(n) == doctest::Approx(std::sqrt(2.0)));
    CHECK(corners(n).size() == 7);

    const auto c = scatterer_from_json(json::parse(kCell));
    CHECK(kind_name(c) == "cell");
    CHECK(index_at(c, {1.5, 0.5}) == cplx{1.5, 0.0});
    CHECK(std::get<geometry::CellScatterer>(c).eta == cplx{0.7});

    const auto d = scatterer_from_json(json::parse(kDisk));
    CHECK(kind_name(d) == "disk");
    CHECK(circumradius(d) == 1.5);
    CHECK(corners(d).empty());
    CHECK(index_at(d, {0.2, 0.0}) == cplx{1.0, 0.2});
  }

  TEST_CASE("JSON round trip and hashing") {
    for (const char* text : {kNest, kCell, kDisk}) {
      const auto s = scatterer_from_json(json::parse(text));
      const auto back = scatterer_from_json(scatterer_to_json(s));
      CHECK(scatterer_to_json(back) == scatterer_to_json(s));
      CHECK(scatterer_hash(back) == scatterer_hash(s));
    }
    const auto a = scatterer_from_json(json::parse(kDisk));
    auto j = json::parse(kDisk);
    j["layers"][0]["eta"] = 0.51;
    CHECK(scatterer_hash(scatterer_from_json(j)) != scatterer_hash(a));
    // Reference values of 64-bit FNV-1a.
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
    CHECK(hex64(1) == "0000000000000001");
  }

  TEST_CASE("files") {
    const auto path = (std::filesystem::temp_directory_path() / "condscat_scatterer_test.json").string();
    const auto s = scatterer_from_json(json::parse(kCell));
    save_scatterer(path, s);
    CHECK(scatterer_hash(load_scatterer(path)) == scatterer_hash(s));
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{not json", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_scatterer(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_scatterer(path), ConfigError);
  }

  TEST_CASE("errors name the offending field") {
    auto j = json::parse(kNest);
    j["layers"][1].erase("eta");
    CHECK(config_error(j).find("scatterer.layers[1]") != std::string::npos);
    CHECK(config_error(j).find("eta") != std::string::npos);

    j = json::parse(kNest);
    j["layers"][0]["colour"] = "red";
    CHECK(config_error(j).find("colour") != std::string::npos);

    j = json::parse(kDisk);
    j["layers"][0]["radius"] = "big";
    CHECK(config_error(j).find("scatterer.layers[0].radius") != std::string::npos);

    j = json::parse(kCell);
    j["eta"] = json::array({1, 2, 3});
    CHECK(config_error(j).find("scatterer.eta") != std::string::npos);

    j = json::parse(kCell);
    j["cells"][0]["vertices"] = json::array({json::array({0, 0}), json::array({1, 0})});
    CHECK(config_error(j).find("vertices") != std::string::npos);

    CHECK(config_error(json{{"type", "sphere"}}).find("scatterer.type") != std::string::npos);
    CHECK(config_error(json::array()).find("scatterer") != std::string::npos);
  }

  TEST_CASE("structural violations are configuration errors") {
    // Inner layer pokes out of the outer one.
    auto j = json::parse(kNest);
    j["layers"][1]["vertices"] = json::array({json::array({-0.3, -0.3}), json::array({3.0, -0.3}), json::array({0, 0.4})});
    CHECK_FALSE(config_error(j).empty());
    // Clockwise polygon.
    j = json::parse(kCell);
    j["cells"][0]["vertices"] = json::array({json::array({0, 0}), json::array({0, 1}), json::array({1, 1}), json::array({1, 0})});
    CHECK_FALSE(config_error(j).empty());
    // Disk radii must decrease.
    j = json::parse(kDisk);
    j["layers"][1]["radius"] = 2.0;
    CHECK_FALSE(config_error(j).empty());
  }

  TEST_CASE("empty scatterers") {
    auto j = json::parse(kDisk);
    for (auto& l : j["layers"]) {
      l["q"] = 1;
      l["eta"] = 0;
    }
    CHECK(is_empty(scatterer_from_json(j)));
    CHECK_FALSE(is_empty(scatterer_from_json(json::parse(kDisk))));
  }
}
