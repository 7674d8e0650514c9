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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli/commands.hpp"
#include "doctest.h"
#include "maevo/optimizer.hpp"
#include "maevo/report.hpp"

using namespace maevo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string line_value(const std::string& text, const std::string& key) {
  const auto at = ("\n" + text).find("\n" + key + ": ");
  REQUIRE(at != std::string::npos);
  const auto start = at + key.size() + 2;
  return text.substr(start, text.find('\n', start) - start);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("maevo-cli-" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_SUITE("cli baseline and optimize") {
  TEST_CASE("single angle prints the matched-filter gain") {
    const auto b = invoke({"baseline", "--angles", "70"});
    REQUIRE(b.code == 0);
    CHECK(std::stod(line_value(b.out, "gain_db")) == doctest::Approx(9.0309).epsilon(1e-5));
    const auto o = invoke({"optimize", "--angles", "70", "--restarts", "2"});
    REQUIRE(o.code == 0);
    CHECK(std::abs(std::stod(line_value(o.out, "gain_db")) - 10 * std::log10(8.0)) < 1e-6);
  }

  TEST_CASE("baseline output is repeatable and matches the library bit for bit") {
    const auto a = invoke({"baseline", "--angles", "35.5,92,141.25"});
    const auto b = invoke({"baseline", "--angles", "35.5,92,141.25"});
    CHECK(a.out == b.out);
    const auto lib = fixed_baseline(DoASet({35.5, 92.0, 141.25}), ArrayConstraints{});
    CHECK(std::stod(line_value(a.out, "gain_db")) == lib.gain_db);
    CHECK(std::stod(line_value(a.out, "gain_linear")) == lib.gain_linear);
  }

  TEST_CASE("optimize matches the library and dominates its printed baseline") {
    const auto o = invoke({"optimize", "--angles", "40,85,130", "--strategy", "gradient", "--seed", "9", "--restarts", "4"});
    REQUIRE(o.code == 0);
    OptimizerConfig cfg;
    cfg.seed = 9;
    cfg.restarts = 4;
    const auto lib = optimize_movable(DoASet({40.0, 85.0, 130.0}), cfg, ArrayConstraints{});
    CHECK(std::stod(line_value(o.out, "gain_db")) == lib.gain_db);
    CHECK(std::stoi(line_value(o.out, "iterations")) == lib.iterations);
    std::stringstream pos(line_value(o.out, "positions_wavelengths"));
    std::string cell;
    for (double x : lib.geometry.positions()) {
      std::getline(pos, cell, ',');
      CHECK(std::stod(cell) == x / 0.125);
    }
    CHECK(std::stod(line_value(o.out, "gain_db")) >= std::stod(line_value(o.out, "baseline_gain_db")));
  }

  TEST_CASE("auto reports the better strategy") {
    const auto a = invoke({"optimize", "--angles", "40,85,130", "--strategy", "auto", "--restarts", "3"});
    const auto g = invoke({"optimize", "--angles", "40,85,130", "--strategy", "gradient", "--restarts", "3"});
    const auto c = invoke({"optimize", "--angles", "40,85,130", "--strategy", "coordinate", "--restarts", "3"});
    REQUIRE(a.code == 0);
    const double best = std::max(std::stod(line_value(g.out, "gain_db")), std::stod(line_value(c.out, "gain_db")));
    CHECK(std::stod(line_value(a.out, "gain_db")) == best);
    CHECK(line_value(c.out, "strategy") == "CoordinateSearch");
  }

  TEST_CASE("bad input exits with status 2") {
    CHECK(invoke({"optimize", "--angles", "190"}).code == 2);
    CHECK(invoke({"optimize", "--angles", "40", "--strategy", "genetic"}).code == 2);
    CHECK(invoke({"baseline", "--angles", "40", "--min-spacing", "1.0"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"baseline"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
  }
}

TEST_SUITE("cli run") {
  TEST_CASE("default scenario writes one row per step and an upgrade event") {
    TempDir dir;
    const auto r = invoke({"run", "--seed", "42", "--steps", "6", "--quiet", "--metrics-out", dir / "m.csv",
                        "--events-out", dir / "e.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto rows = metrics_from_csv(slurp(dir / "m.csv"));
    CHECK(rows.size() == 6);
    const auto events = events_from_json(slurp(dir / "e.json"));
    REQUIRE_FALSE(events.empty());
    CHECK(events[0].trigger_step == 0);
    CHECK(events[0].reason == TriggerReason::HardwareChange);
  }

  TEST_CASE("same seed gives byte-identical files") {
    TempDir dir;
    for (const char* tag : {"a", "b"}) {
      const auto r = invoke({"run", "--seed", "42", "--steps", "5", "--quiet", "--metrics-out",
                          dir / (std::string(tag) + ".csv"), "--events-out", dir / (std::string(tag) + ".json")});
      REQUIRE(r.code == 0);
    }
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  }

  TEST_CASE("infeasible spacing exits 2 naming the field") {
    TempDir dir;
    write(dir / "bad.json", R"({"schema_version": 1, "constraints": {"min_spacing": 0.5}})");
    const auto r = invoke({"run", "--config", dir / "bad.json", "--metrics-out", dir / "m.csv", "--events-out",
                        dir / "e.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("constraints.min_spacing") != std::string::npos);
  }

  TEST_CASE("unreadable config and unwritable outputs") {
    TempDir dir;
    CHECK(invoke({"run", "--config", dir / "missing.json"}).code == 2);
    const auto r = invoke({"run", "--steps", "1", "--metrics-out", dir / "no/such/dir/m.csv", "--events-out",
                        dir / "e.json"});
    CHECK(r.code == 3);
  }

  TEST_CASE("--llm without a key is a startup error") {
    ::unsetenv("MAEVO_LLM_API_KEY");
    TempDir dir;
    const auto r = invoke({"run", "--llm", "--steps", "1", "--metrics-out", dir / "m.csv", "--events-out", dir / "e.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("MAEVO_LLM_API_KEY") != std::string::npos);
  }

  TEST_CASE("summary mentions steps and events") {
    TempDir dir;
    const auto r = invoke({"run", "--steps", "2", "--strategy", "coordinate", "--snr", "15", "--metrics-out",
                        dir / "m.csv", "--events-out", dir / "e.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("steps: 2") != std::string::npos);
    CHECK(r.out.find("HardwareChange=1") != std::string::npos);
  }
}
