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

#include "maevo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "maevo/errors.hpp"

namespace maevo {
namespace {

constexpr int kMaxStepHalvings = 20;
/// Coordinate-search grid, in wavelengths.
constexpr double kCoordinateGrid = 0.01;

/// Sum gain as a function of positions for frozen weights.
class FrozenWeightGain {
 public:
  FrozenWeightGain(const ArrayConstraints& constraints, std::span<const Complex> weights,
                   const DoASet& doas)
      : conj_weights_(weights.size()) {
    for (std::size_t n = 0; n < weights.size(); ++n) conj_weights_[n] = std::conj(weights[n]);
    alphas_.reserve(doas.size());
    for (double angle : doas.angles()) {
      alphas_.push_back(2.0 * kPi / constraints.wavelength * std::cos(angle * kPi / 180.0));
    }
  }

  /// g_k = w^H a_k for every source.
  ComplexVector responses(std::span<const double> positions) const {
    ComplexVector g(alphas_.size());
    for (std::size_t k = 0; k < alphas_.size(); ++k) {
      Complex acc{};
      for (std::size_t n = 0; n < positions.size(); ++n) {
        acc += conj_weights_[n] * std::polar(1.0, alphas_[k] * positions[n]);
      }
      g[k] = acc;
    }
    return g;
  }

  double operator()(std::span<const double> positions) const {
    double total = 0.0;
    for (const auto& g : responses(positions)) total += std::norm(g);
    return total;
  }

  /// Gain after moving element n from `from` to `to`, given the current responses.
  double moved(const ComplexVector& g, std::size_t n, double from, double to) const {
    double total = 0.0;
    for (std::size_t k = 0; k < alphas_.size(); ++k) {
      const Complex delta =
          conj_weights_[n] * (std::polar(1.0, alphas_[k] * to) - std::polar(1.0, alphas_[k] * from));
      total += std::norm(g[k] + delta);
    }
    return total;
  }

  const std::vector<double>& alphas() const { return alphas_; }
  const ComplexVector& conj_weights() const { return conj_weights_; }

 private:
  ComplexVector conj_weights_;
  std::vector<double> alphas_;
};

struct WeightedGeometry {
  ArrayGeometry geometry;
  ComplexVector weights;
  double gain = 0.0;
};

WeightedGeometry reweight(ArrayGeometry geometry, const DoASet& doas) {
  ComplexVector w = optimal_weights(geometry, doas);
  const double gain = sum_beam_gain(geometry, w, doas).linear;
  return WeightedGeometry{std::move(geometry), std::move(w), gain};
}

std::vector<double> random_feasible_positions(const ArrayConstraints& c, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(c.num_elements);
  const double lo = -c.position_bound;
  const double hi = c.position_bound - static_cast<double>(n - 1) * c.min_spacing;
  std::vector<double> y(n, lo);
  if (hi > lo) {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : y) v = dist(rng);
    std::sort(y.begin(), y.end());
  }
  for (std::size_t i = 0; i < n; ++i) y[i] += static_cast<double>(i) * c.min_spacing;
  // Rounding can push the last element a hair past the bound.
  return project_positions(y, c);
}

bool improved_enough(double before, double after, double tolerance_db) {
  return to_db(after) - to_db(before) >= tolerance_db;
}

/// One projected-gradient step with step halving on the frozen-weight gain.
/// Returns nullopt when no trial step increases the gain.
std::optional<std::vector<double>> gradient_step(const WeightedGeometry& current, const DoASet& doas,
                                                 const OptimizerConfig& config) {
  const ArrayConstraints& c = current.geometry.constraints();
  const std::vector<double> grad = position_gradient(current.geometry, current.weights, doas);
  double scale = 0.0;
  for (double g : grad) scale = std::max(scale, std::abs(g));
  if (!(scale > 0.0)) return std::nullopt;

  const FrozenWeightGain objective(c, current.weights, doas);
  const std::vector<double>& x = current.geometry.positions();
  double step = config.step_size * c.wavelength;
  for (int halving = 0; halving <= kMaxStepHalvings; ++halving, step /= 2) {
    std::vector<double> trial(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) trial[n] = x[n] + step * grad[n] / scale;
    trial = project_positions(trial, c);
    if (objective(trial) > current.gain) return trial;
  }
  return std::nullopt;
}

/// One sweep of per-coordinate exhaustive line search on a grid anchored at the
/// current coordinate. Returns nullopt when no coordinate moved.
std::optional<std::vector<double>> coordinate_sweep(const WeightedGeometry& current, const DoASet& doas) {
  const ArrayConstraints& c = current.geometry.constraints();
  const FrozenWeightGain objective(c, current.weights, doas);
  std::vector<double> x = current.geometry.positions();
  ComplexVector g = objective.responses(x);
  double best_gain = current.gain;
  const double delta = kCoordinateGrid * c.wavelength;
  bool moved = false;

  for (std::size_t n = 0; n < x.size(); ++n) {
    const double lo = n == 0 ? -c.position_bound : x[n - 1] + c.min_spacing;
    const double hi = n + 1 == x.size() ? c.position_bound : x[n + 1] - c.min_spacing;
    const auto m_lo = static_cast<long>(std::ceil((lo - x[n]) / delta));
    const auto m_hi = static_cast<long>(std::floor((hi - x[n]) / delta));
    double best_x = x[n];
    for (long m = m_lo; m <= m_hi; ++m) {
      if (m == 0) continue;
      const double candidate = x[n] + static_cast<double>(m) * delta;
      if (candidate < lo || candidate > hi) continue;
      const double gain = objective.moved(g, n, x[n], candidate);
      if (gain > best_gain) {
        best_gain = gain;
        best_x = candidate;
      }
    }
    if (best_x != x[n]) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] += objective.conj_weights()[n] * (std::polar(1.0, objective.alphas()[k] * best_x) -
                                               std::polar(1.0, objective.alphas()[k] * x[n]));
      }
      x[n] = best_x;
      moved = true;
    }
  }
  if (!moved) return std::nullopt;
  return x;
}

BeamformingSolution run_restart(const DoASet& doas, const OptimizerConfig& config,
                                const ArrayConstraints& constraints, int restart_index) {
  std::vector<double> start;
  if (restart_index == 0) {
    start = ArrayGeometry::uniform(constraints).positions();
  } else {
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(restart_index));
    start = random_feasible_positions(constraints, rng);
  }

  WeightedGeometry current = reweight(ArrayGeometry(constraints, std::move(start)), doas);
  std::vector<double> history{current.gain};
  bool converged = false;
  int iterations = 0;

  while (iterations < config.max_outer_iterations) {
    ++iterations;
    std::optional<std::vector<double>> next = config.strategy == Strategy::CoordinateSearch
                                                  ? coordinate_sweep(current, doas)
                                                  : gradient_step(current, doas, config);
    if (!next) {
      converged = true;
      break;
    }
    WeightedGeometry candidate = reweight(current.geometry.with_positions(std::move(*next)), doas);
    const double previous = current.gain;
    // Guard against a Rayleigh-quotient rounding dip below the accepted step.
    if (candidate.gain < previous) {
      converged = true;
      break;
    }
    current = std::move(candidate);
    history.push_back(current.gain);
    if (!improved_enough(previous, current.gain, config.gain_tolerance_db)) {
      converged = true;
      break;
    }
  }

  BeamformingSolution solution{.geometry = current.geometry, .weights = current.weights};
  solution.gain_linear = current.gain;
  solution.gain_db = to_db(current.gain);
  solution.converged = converged;
  solution.iterations = iterations;
  solution.strategy_used = config.strategy;
  solution.restart_index = restart_index;
  solution.gain_history = std::move(history);
  return solution;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::GradientAlternating: return "GradientAlternating";
    case Strategy::CoordinateSearch: return "CoordinateSearch";
    case Strategy::FixedBaseline: return "FixedBaseline";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "gradient" || text == "GradientAlternating") return Strategy::GradientAlternating;
  if (text == "coordinate" || text == "CoordinateSearch") return Strategy::CoordinateSearch;
  if (text == "baseline" || text == "FixedBaseline") return Strategy::FixedBaseline;
  return std::nullopt;
}

void OptimizerConfig::validate() const {
  if (restarts < 1) throw ValidationError("optimizer.restarts must be at least 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ValidationError("optimizer.step_size must be positive");
  }
  if (max_outer_iterations < 1) throw ValidationError("optimizer.max_outer_iterations must be at least 1");
  if (!(gain_tolerance_db >= 0.0)) throw ValidationError("optimizer.gain_tolerance must be non-negative");
  if (strategy == Strategy::FixedBaseline) {
    throw ValidationError("optimizer.strategy: FixedBaseline is not a search strategy");
  }
}

ComplexVector optimal_weights(const ArrayGeometry& geometry, const DoASet& doas) {
  return principal_eigenpair(gain_matrix(geometry, doas)).eigenvector;
}

std::vector<double> project_positions(std::span<const double> raw, const ArrayConstraints& constraints) {
  if (raw.empty()) throw ValidationError("cannot project an empty position list");
  ArrayConstraints c = constraints;
  c.num_elements = static_cast<int>(raw.size());
  c.require_feasible();

  const std::size_t n = raw.size();
  const double d = c.min_spacing;
  const double lo = -c.position_bound;
  const double hi = c.position_bound - static_cast<double>(n - 1) * d;

  // Pool adjacent violators on y = x - n d.
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back({raw[i] - static_cast<double>(i) * d, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }

  std::vector<double> out;
  out.reserve(n);
  for (const Block& b : blocks) {
    const double value = std::clamp(b.mean(), lo, std::max(lo, hi));
    for (std::size_t j = 0; j < b.count; ++j) out.push_back(value);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::clamp(out[i] + static_cast<double>(i) * d, -c.position_bound, c.position_bound);
  }
  return out;
}

std::vector<double> position_gradient(const ArrayGeometry& geometry, std::span<const Complex> weights,
                                      const DoASet& doas) {
  if (weights.size() != geometry.size()) throw ValidationError("weight/geometry dimension mismatch");
  const FrozenWeightGain model(geometry.constraints(), weights, doas);
  const auto& x = geometry.positions();
  const ComplexVector g = model.responses(x);
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double alpha = model.alphas()[k];
      const Complex term = std::conj(g[k]) * model.conj_weights()[n] * Complex(0.0, alpha) *
                           std::polar(1.0, alpha * x[n]);
      acc += 2.0 * term.real();
    }
    grad[n] = acc;
  }
  return grad;
}

BeamformingSolution optimize_movable(const DoASet& doas, const OptimizerConfig& config,
                                     const ArrayConstraints& constraints) {
  config.validate();
  constraints.require_feasible();

  auto guarded = [&](int r) {
    try {
      return run_restart(doas, config, constraints, r);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("restart " + std::to_string(r) + ": " + e.what(), e.last_residual(), r);
    }
  };

  std::vector<std::optional<BeamformingSolution>> results(static_cast<std::size_t>(config.restarts));
  const int workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1) {
    for (int r = 0; r < config.restarts; ++r) results[static_cast<std::size_t>(r)] = guarded(r);
  } else {
    for (int first = 0; first < config.restarts; first += workers) {
      const int last = std::min(config.restarts, first + workers);
      std::vector<std::future<BeamformingSolution>> wave;
      for (int r = first; r < last; ++r) wave.push_back(std::async(std::launch::async, guarded, r));
      for (int r = first; r < last; ++r) {
        results[static_cast<std::size_t>(r)] = wave[static_cast<std::size_t>(r - first)].get();
      }
    }
  }

  // Reduce in restart order so ties resolve to the lowest index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r]->gain_linear > results[best]->gain_linear) best = r;
  }
  return std::move(*results[best]);
}

BeamformingSolution fixed_baseline(const DoASet& doas, const ArrayConstraints& constraints) {
  ArrayGeometry geometry = ArrayGeometry::uniform(constraints);
  ComplexVector w = optimal_weights(geometry, doas);
  const GainValue gain = sum_beam_gain(geometry, w, doas);
  BeamformingSolution solution{.geometry = std::move(geometry), .weights = std::move(w)};
  solution.gain_linear = gain.linear;
  solution.gain_db = gain.db;
  solution.converged = true;
  solution.iterations = 0;
  solution.strategy_used = Strategy::FixedBaseline;
  solution.gain_history = {gain.linear};
  return solution;
}

}  // namespace maevo
