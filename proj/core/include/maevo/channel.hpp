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

// UAV angle trajectories and narrowband line-of-sight CSI snapshots:
//   y_r = sum_k s_{k,r} a(theta_k) + n_r,
// with unit-variance circular Gaussian symbols and white circular Gaussian
// noise of per-element variance 10^(-snr_db / 10).

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "maevo/array.hpp"

namespace maevo {

struct RandomWalkDrift {
  double sigma_deg_per_step = 0.0;
};

struct ScriptedDrift {
  /// One DoA set per step; returned verbatim.
  std::vector<DoASet> waypoints;
};

using Drift = std::variant<RandomWalkDrift, ScriptedDrift>;

struct AngleBounds {
  double lower_deg = 5.0;
  double upper_deg = 175.0;

  friend bool operator==(const AngleBounds&, const AngleBounds&) = default;
};

struct TrajectoryConfig {
  int num_steps = 1;
  DoASet initial_angles{std::vector<double>{60.0, 90.0, 120.0}};
  Drift drift = RandomWalkDrift{};
  AngleBounds angle_bounds;
  std::uint64_t seed = 0;

  void validate() const;
};

/// T DoA sets. Random walks start at initial_angles, add N(0, sigma^2) per UAV
/// per step and clamp to the bounds; a UAV clamped onto an angle already taken
/// by another is nudged inward by 1e-6 degrees so the set stays distinct.
std::vector<DoASet> generate_trajectory(const TrajectoryConfig& config);

struct CsiSnapshotBatch {
  std::size_t num_snapshots = 0;
  std::size_t num_elements = 0;
  /// Row-major R x N.
  ComplexVector snapshots;
  double snr_db = 0.0;
  /// Ground truth for scoring only; estimators take the covariance, not the batch.
  DoASet true_angles{std::vector<double>{90.0}};
  std::uint64_t seed = 0;

  std::span<const Complex> snapshot(std::size_t r) const {
    return std::span<const Complex>(snapshots).subspan(r * num_elements, num_elements);
  }
};

inline constexpr int kDefaultSnapshots = 200;

CsiSnapshotBatch synthesize_csi(const ArrayGeometry& geometry, const DoASet& doas, double snr_db,
                                int num_snapshots, std::uint64_t seed);

}  // namespace maevo
