// Copyright 2026 The maevo Authors
//
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maevo/array.hpp"

namespace maevo {
class ChatTransport;
}

namespace maevo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOutput = 3;
inline constexpr int kExitRuntime = 4;

struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<double> snr_db;
  std::string strategy = "config";
  bool llm = false;
  bool quiet = false;
  std::string metrics_out = "metrics.csv";
  std::string events_out = "events.json";
};

struct SolveOptions {
  std::vector<double> angles_deg;
  ArrayConstraints constraints;
  std::string strategy = "auto";
  int restarts = 16;
  std::uint64_t seed = 0;
  int max_outer_iterations = 500;
  double step_size = 0.05;
};

/// Runs one episode and writes the metrics table and event log.
/// `transport` replaces the HTTP client for --llm when non-null.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err, ChatTransport* transport = nullptr);
int cmd_optimize(const SolveOptions& options, std::ostream& out, std::ostream& err);
int cmd_baseline(const SolveOptions& options, std::ostream& out, std::ostream& err);

/// Full command line without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            ChatTransport* transport = nullptr);

/// %.17g, so printed values parse back to the identical double.
std::string exact(double value);

}  // namespace maevo::cli
