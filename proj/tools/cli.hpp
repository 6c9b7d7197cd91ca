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

//! \file cli.hpp
//! Command-line front end: one JSON config per run, artifacts plus manifest.json in the
//! output directory. Exit codes: 0 ok, 1 configuration error, 2 solver failure,
//! 3 assertion failure.

#ifndef CONDSCAT_TOOLS_CLI_HPP_
#define CONDSCAT_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace condscat::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kSolverFailure = 2, kAssertionFailure = 3 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"solve", "farfield", "ucp-verify", "det-scan",
                                          "invis-scan", "diff", "admissibility"};
  return c;
}

struct Outcome {
  int code = kOk;
  std::string status = "ok";   // ok | config_error | solver_failure | assertion_failure
  std::string reason;
  nlohmann::json manifest;     // also written to <output>/manifest.json when possible
};

/// Runs `command` on a parsed config. `base_dir` resolves relative scatterer paths;
/// a non-empty `output_override` replaces the config's "output".
Outcome run(const std::string& command, const nlohmann::json& config, const std::string& base_dir,
            const std::string& output_override = "");

/// Reads the config file, then as run(). Unreadable or malformed files are configuration errors.
Outcome run_file(const std::string& command, const std::string& config_path, const std::string& output_override = "");

/// argv-style entry point used by main(); prints the machine-readable outcome line to `err`.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace condscat::cli

#endif  // CONDSCAT_TOOLS_CLI_HPP_
