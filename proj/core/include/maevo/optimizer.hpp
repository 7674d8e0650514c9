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

// Joint optimization of movable element positions and beamforming weights.
//
// For fixed positions the optimal unit-norm weights are the dominant
// eigenvector of the gain matrix, so the outer loop only has to search over
// positions. Two position strategies are provided; both alternate an exact
// weight update with an ascent step that keeps the geometry feasible.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maevo/array.hpp"

namespace maevo {

enum class Strategy {
  GradientAlternating,
  CoordinateSearch,
  /// Tag for fixed-array solutions; not a valid search strategy.
  FixedBaseline,
};

std::string_view to_string(Strategy s);
/// Accepts "gradient"/"GradientAlternating", "coordinate"/"CoordinateSearch", "baseline".
std::optional<Strategy> parse_strategy(std::string_view text);

struct OptimizerConfig {
  int restarts = 16;
  /// Maximum per-coordinate move of one gradient step, in wavelengths.
  double step_size = 0.05;
  int max_outer_iterations = 500;
  double gain_tolerance_db = 1e-6;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::GradientAlternating;

  void validate() const;
};

struct BeamformingSolution {
  ArrayGeometry geometry;
  ComplexVector weights;
  double gain_db = 0.0;
  double gain_linear = 0.0;
  bool converged = false;
  int iterations = 0;
  Strategy strategy_used = Strategy::FixedBaseline;
  /// Restart that produced this solution (0 is the uniform start).
  int restart_index = 0;
  /// Sum gain after each exact weight update, starting with the initial geometry.
  std::vector<double> gain_history;
};

/// Unit-norm maximizer of sum_k |w^H a_k|^2: the dominant eigenvector of gain_matrix.
ComplexVector optimal_weights(const ArrayGeometry& geometry, const DoASet& doas);

/// Euclidean projection onto {x : x[n+1] - x[n] >= min_spacing, |x[n]| <= position_bound}.
///
/// The spacing constraint is removed by y[n] = x[n] - n * min_spacing, which turns the
/// problem into isotonic regression inside a single box; pool-adjacent-violators plus
/// clamping solves that exactly. The element count is taken from `raw`.
std::vector<double> project_positions(std::span<const double> raw, const ArrayConstraints& constraints);

/// dG/dx_n = sum_k 2 Re{ conj(g_k) conj(w_n) j alpha_k exp(j alpha_k x_n) },
/// g_k = w^H a_k, alpha_k = (2 pi / lambda) cos(theta_k).
std::vector<double> position_gradient(const ArrayGeometry& geometry, std::span<const Complex> weights,
                                      const DoASet& doas);

/// Multi-start alternating optimization. Restart 0 starts from the uniform
/// reference array, so the result never falls below fixed_baseline().
BeamformingSolution optimize_movable(const DoASet& doas, const OptimizerConfig& config,
                                     const ArrayConstraints& constraints);

/// Uniform reference array with optimal weights for `doas`.
BeamformingSolution fixed_baseline(const DoASet& doas, const ArrayConstraints& constraints);

}  // namespace maevo
