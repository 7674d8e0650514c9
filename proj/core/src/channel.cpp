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

#include "maevo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "maevo/errors.hpp"

namespace maevo {
namespace {

constexpr double kCollisionNudgeDeg = 1e-6;

void validate_bounds(const AngleBounds& b) {
  if (!(b.lower_deg > 0.0 && b.upper_deg < 180.0 && b.lower_deg < b.upper_deg)) {
    throw ValidationError("trajectory.angle_bounds must satisfy 0 < lower < upper < 180");
  }
}

DoASet clamp_distinct(std::vector<double> angles, const AngleBounds& b) {
  for (std::size_t k = 0; k < angles.size(); ++k) {
    double a = std::clamp(angles[k], b.lower_deg, b.upper_deg);
    const double inward = a >= (b.lower_deg + b.upper_deg) / 2 ? -kCollisionNudgeDeg : kCollisionNudgeDeg;
    while (std::find(angles.begin(), angles.begin() + static_cast<long>(k), a) !=
           angles.begin() + static_cast<long>(k)) {
      a += inward;
    }
    angles[k] = a;
  }
  return DoASet(std::move(angles));
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (num_steps < 1) throw ValidationError("trajectory.num_steps must be at least 1");
  validate_bounds(angle_bounds);
  if (const auto* scripted = std::get_if<ScriptedDrift>(&drift)) {
    if (scripted->waypoints.size() != static_cast<std::size_t>(num_steps)) {
      throw ValidationError("trajectory.waypoints: expected " + std::to_string(num_steps) +
                            " entries, got " + std::to_string(scripted->waypoints.size()));
    }
  } else {
    const double sigma = std::get<RandomWalkDrift>(drift).sigma_deg_per_step;
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw ValidationError("trajectory.drift.sigma_deg_per_step must be finite and non-negative");
    }
  }
}

std::vector<DoASet> generate_trajectory(const TrajectoryConfig& config) {
  config.validate();
  if (const auto* scripted = std::get_if<ScriptedDrift>(&config.drift)) return scripted->waypoints;

  const double sigma = std::get<RandomWalkDrift>(config.drift).sigma_deg_per_step;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> step(0.0, 1.0);

  std::vector<DoASet> out;
  out.reserve(static_cast<std::size_t>(config.num_steps));
  out.push_back(config.initial_angles);
  for (int t = 1; t < config.num_steps; ++t) {
    std::vector<double> next = out.back().angles();
    for (double& a : next) a += sigma * step(rng);
    out.push_back(clamp_distinct(std::move(next), config.angle_bounds));
  }
  return out;
}

CsiSnapshotBatch synthesize_csi(const ArrayGeometry& geometry, const DoASet& doas, double snr_db,
                                int num_snapshots, std::uint64_t seed) {
  if (num_snapshots < 1) throw ValidationError("num_snapshots must be at least 1");
  if (!std::isfinite(snr_db)) throw ValidationError("snr_db must be finite");

  std::vector<ComplexVector> steering;
  steering.reserve(doas.size());
  for (double angle : doas.angles()) steering.push_back(steering_vector(geometry, angle));

  const std::size_t n = geometry.size();
  const auto r_count = static_cast<std::size_t>(num_snapshots);
  const double noise_sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
  const double symbol_sigma = std::sqrt(0.5);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CsiSnapshotBatch batch{r_count, n, ComplexVector(r_count * n), snr_db, doas, seed};
  for (std::size_t r = 0; r < r_count; ++r) {
    Complex* row = batch.snapshots.data() + r * n;
    for (const auto& a : steering) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      const Complex symbol(symbol_sigma * re, symbol_sigma * im);
      for (std::size_t i = 0; i < n; ++i) row[i] += symbol * a[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      row[i] += Complex(noise_sigma * re, noise_sigma * im);
    }
  }
  return batch;
}

}  // namespace maevo
