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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "maevo/errors.hpp"
#include "maevo/optimizer.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace maevo;

namespace {

constexpr double kLambda = 0.125;
const double kMatchedDb = 10 * std::log10(8.0);

bool feasible(const std::vector<double>& x, const ArrayConstraints& c) {
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (std::abs(x[n]) > c.position_bound + 1e-12) return false;
    if (n > 0 && x[n] - x[n - 1] < c.min_spacing - 1e-12) return false;
  }
  return true;
}

OptimizerConfig quick(std::uint64_t seed, Strategy s = Strategy::GradientAlternating) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  cfg.strategy = s;
  return cfg;
}

}  // namespace

TEST_SUITE("optimal weights") {
  TEST_CASE("single source gives the matched filter") {
    const auto g = ArrayGeometry::uniform(ArrayConstraints{});
    const DoASet d({65.0});
    const auto w = optimal_weights(g, d);
    const auto a = steering_vector(g, 65.0);
    Complex inner{};
    for (std::size_t n = 0; n < 8; ++n) inner += std::conj(w[n]) * a[n];
    CHECK(std::abs(inner) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-10));
    CHECK(sum_beam_gain(g, w, d).linear == doctest::Approx(8.0).epsilon(1e-10));
  }

  TEST_CASE("two-element gain matches the closed-form 2x2 eigenvalue") {
    const ArrayGeometry g(ArrayConstraints::for_wavelength(kLambda, 2), {0.0, kLambda / 2});
    const std::vector<double> angles{90.0, 60.0};
    const DoASet d(angles);
    const auto m = oracle::outer_product_sum(g.positions(), kLambda, angles);
    const double ref = oracle::closed_form_2x2_max(m[0].real(), m[1], m[3].real());
    CHECK(std::abs(sum_beam_gain(g, optimal_weights(g, d), d).linear - ref) < 1e-12);
  }

  TEST_CASE("dominates random unit-norm weights") {
    gen::Gen rng(99);
    const auto c = ArrayConstraints::for_wavelength(kLambda, 4);
    const auto g = rng.geometry(c);
    const auto d = rng.doas(3);
    const double best = sum_beam_gain(g, optimal_weights(g, d), d).linear;
    for (int i = 0; i < 1000; ++i) CHECK(sum_beam_gain(g, rng.unit_vector(4), d).linear <= best + 1e-9);
  }
}

TEST_SUITE("projection") {
  TEST_CASE("feasible input is returned unchanged") {
    const ArrayConstraints c;
    const auto u = ArrayGeometry::uniform(c).positions();
    const auto p = project_positions(u, c);
    for (std::size_t n = 0; n < u.size(); ++n) CHECK(std::abs(p[n] - u[n]) < 1e-15);
  }

  TEST_CASE("two crowded elements split symmetrically about their mean") {
    ArrayConstraints c = ArrayConstraints::for_wavelength(kLambda, 2);
    const std::vector<double> raw{0.0, 0.01};
    const auto p = project_positions(raw, c);
    // min (x1)^2 + (x2 - 0.01)^2 s.t. x2 - x1 = d  ->  x1 = (0.01 - d) / 2
    const double x1 = (0.01 - c.min_spacing) / 2;
    CHECK(std::abs(p[0] - x1) < 1e-12);
    CHECK(std::abs(p[1] - (x1 + c.min_spacing)) < 1e-12);
    CHECK(std::abs(p[0] + 0.02625) < 1e-12);
    CHECK(std::abs(p[1] - 0.03625) < 1e-12);
  }

  TEST_CASE("single element is clamped") {
    const auto c = ArrayConstraints::for_wavelength(kLambda, 1);
    const std::vector<double> raw{0.7};
    CHECK(project_positions(raw, c)[0] == doctest::Approx(0.625).epsilon(1e-15));
  }

  TEST_CASE("three elements agree with the active-set oracle") {
    gen::Gen rng(3);
    const auto c = ArrayConstraints::for_wavelength(kLambda, 3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> raw{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const auto p = project_positions(raw, c);
      const auto ref = oracle::active_set_projection_3(raw, c.min_spacing, c.position_bound);
      for (int n = 0; n < 3; ++n) CHECK(std::abs(p[n] - ref[n]) < 1e-9);
      CHECK(feasible(p, c));
    }
  }

  TEST_CASE("idempotent and feasible for eight elements") {
    gen::Gen rng(4);
    const ArrayConstraints c;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> raw;
      for (int n = 0; n < 8; ++n) raw.push_back(rng.uniform(-1.5, 1.5));
      const auto p = project_positions(raw, c);
      CHECK(feasible(p, c));
      const auto q = project_positions(p, c);
      for (int n = 0; n < 8; ++n) CHECK(std::abs(p[n] - q[n]) <= 1e-12);
    }
  }

  TEST_CASE("infeasible set is a configuration error") {
    ArrayConstraints c;
    c.position_bound = 0.1;
    const std::vector<double> raw(8, 0.0);
    CHECK_THROWS_AS(project_positions(raw, c), ConfigurationError);
  }
}

TEST_SUITE("position gradient") {
  TEST_CASE("matched filter is flat") {
    gen::Gen rng(8);
    const ArrayConstraints c;
    const auto g = rng.geometry(c);
    const DoASet d({48.0});
    auto w = steering_vector(g, 48.0);
    for (auto& x : w) x /= std::sqrt(8.0);
    for (double v : position_gradient(g, w, d)) CHECK(std::abs(v) < 1e-9);
  }

  TEST_CASE("broadside source has zero gradient") {
    gen::Gen rng(9);
    const ArrayConstraints c;
    const auto g = rng.geometry(c);
    for (double v : position_gradient(g, rng.unit_vector(8), DoASet({90.0}))) CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("agrees with central differences") {
    gen::Gen rng(10);
    const auto c = ArrayConstraints::for_wavelength(kLambda, 4);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = rng.geometry(c);
      const auto d = rng.doas(2);
      const auto w = rng.unit_vector(4);
      const auto grad = position_gradient(g, w, d);
      const auto ref = oracle::central_difference_gradient(g.positions(), kLambda, w, d.angles(), 1e-6 * kLambda);
      const double scale = std::max(1.0, *std::max_element(ref.begin(), ref.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
      for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(grad[n] - ref[n]) <= 1e-4 * std::max(std::abs(ref[n]), 1e-3 * scale));
    }
  }
}

TEST_SUITE("movable optimization") {
  TEST_CASE("single source reaches the matched-filter gain") {
    const auto s = optimize_movable(DoASet({75.0}), quick(1), ArrayConstraints{});
    CHECK(std::abs(s.gain_db - kMatchedDb) < 1e-6);
  }

  TEST_CASE("two elements reach the exhaustive grid optimum") {
    const auto c = ArrayConstraints::for_wavelength(kLambda, 2);
    gen::Gen rng(12);
    for (int trial = 0; trial < 5; ++trial) {
      const auto angles = rng.angles(2, 20, 160, 10);
      for (auto strategy : {Strategy::GradientAlternating, Strategy::CoordinateSearch}) {
        const auto s = optimize_movable(DoASet(angles), quick(trial, strategy), c);
        const double ref = oracle::two_element_grid_optimum(kLambda, c.min_spacing, c.position_bound, angles, 0.01 * kLambda);
        CHECK(s.gain_db >= 10 * std::log10(ref) - 0.1);
      }
    }
  }

  TEST_CASE("three sources beat the fixed baseline and stay feasible") {
    gen::Gen rng(13);
    const ArrayConstraints c;
    for (int trial = 0; trial < 5; ++trial) {
      const auto d = rng.doas(3, 20, 160, 5);
      for (auto strategy : {Strategy::GradientAlternating, Strategy::CoordinateSearch}) {
        const auto s = optimize_movable(d, quick(trial, strategy), c);
        const auto b = fixed_baseline(d, c);
        CHECK(s.gain_linear >= b.gain_linear - 1e-9);
        CHECK(feasible(s.geometry.positions(), c));
        CHECK(norm(s.weights) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(s.gain_linear - sum_beam_gain(s.geometry, s.weights, d).linear) < 1e-9);
        CHECK(s.strategy_used == strategy);
        for (std::size_t i = 1; i < s.gain_history.size(); ++i) CHECK(s.gain_history[i] >= s.gain_history[i - 1] - 1e-12);
      }
    }
  }

  TEST_CASE("identical inputs give identical solutions") {
    const DoASet d({40.0, 85.0, 130.0});
    const auto a = optimize_movable(d, quick(77), ArrayConstraints{});
    const auto b = optimize_movable(d, quick(77), ArrayConstraints{});
    CHECK(a.geometry == b.geometry);
    CHECK(a.weights == b.weights);
    CHECK(a.gain_linear == b.gain_linear);
    CHECK(a.restart_index == b.restart_index);
    CHECK(a.gain_history == b.gain_history);
  }

  TEST_CASE("a single restart is the uniform start") {
    OptimizerConfig cfg = quick(5);
    cfg.restarts = 1;
    const auto s = optimize_movable(DoASet({30.0, 100.0}), cfg, ArrayConstraints{});
    CHECK(s.restart_index == 0);
    CHECK(s.gain_history.front() == doctest::Approx(fixed_baseline(DoASet({30.0, 100.0}), ArrayConstraints{}).gain_linear));
  }

  TEST_CASE("config validation") {
    OptimizerConfig cfg;
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.strategy = Strategy::FixedBaseline;
    CHECK_THROWS(cfg.validate());
    ArrayConstraints c;
    c.min_spacing = 1.0;
    CHECK_THROWS_AS(optimize_movable(DoASet({50.0}), OptimizerConfig{}, c), ConfigurationError);
  }

  TEST_CASE("strategy names") {
    CHECK(parse_strategy("gradient") == Strategy::GradientAlternating);
    CHECK(parse_strategy("CoordinateSearch") == Strategy::CoordinateSearch);
    CHECK(parse_strategy("baseline") == Strategy::FixedBaseline);
    CHECK_FALSE(parse_strategy("annealing").has_value());
    CHECK(to_string(Strategy::CoordinateSearch) == "CoordinateSearch");
  }
}

TEST_SUITE("fixed baseline") {
  TEST_CASE("single source") {
    const auto b = fixed_baseline(DoASet({120.0}), ArrayConstraints{});
    CHECK(std::abs(b.gain_db - kMatchedDb) < 1e-6);
    CHECK(b.converged);
    CHECK(b.strategy_used == Strategy::FixedBaseline);
    CHECK(b.geometry == ArrayGeometry::uniform(ArrayConstraints{}));
  }

  TEST_CASE("pure function of its inputs") {
    const DoASet d({20.0, 95.0, 140.0});
    const auto a = fixed_baseline(d, ArrayConstraints{});
    const auto b = fixed_baseline(d, ArrayConstraints{});
    CHECK(a.weights == b.weights);
    CHECK(a.gain_db == b.gain_db);
  }

  TEST_CASE("equals the dense-oracle eigenvalue of the uniform array") {
    gen::Gen rng(14);
    const ArrayConstraints c;
    const auto u = ArrayGeometry::uniform(c).positions();
    for (int trial = 0; trial < 20; ++trial) {
      const auto angles = rng.angles(3);
      const auto b = fixed_baseline(DoASet(angles), c);
      CHECK(std::abs(b.gain_linear - oracle::dense_max_eigenvalue(8, oracle::outer_product_sum(u, kLambda, angles))) < 1e-9);
    }
  }
}
