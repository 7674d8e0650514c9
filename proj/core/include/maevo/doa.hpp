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

// Direction-of-arrival estimation from CSI snapshots by grid search over a
// pseudo-spectrum (conventional Bartlett beamscan or MUSIC).

#include <optional>
#include <string_view>
#include <vector>

#include "maevo/array.hpp"
#include "maevo/channel.hpp"

namespace maevo {

enum class DoaMethod {
  /// P(theta) = a^H R a / N.
  Bartlett,
  /// P(theta) = N / ||E_n^H a||^2 with E_n the N-K noise eigenvectors of R.
  Music,
};

std::string_view to_string(DoaMethod m);
std::optional<DoaMethod> parse_doa_method(std::string_view text);

struct EstimationOptions {
  double grid_resolution_deg = 0.5;
  AngleBounds angle_bounds;
  double min_peak_separation_deg = 2.0;
  DoaMethod method = DoaMethod::Bartlett;
};

struct DoaEstimate {
  /// Ascending, one per requested source, each a grid point.
  DoASet angles{std::vector<double>{90.0}};
  std::vector<double> grid_deg;
  std::vector<double> spectrum;
  double grid_resolution_deg = 0.0;
  /// Spectrum value at each returned angle, in the same order.
  std::vector<double> peak_values;
  /// Set when fewer than K separated peaks existed or the spectrum is flat to 1%.
  bool low_confidence = false;
};

/// (1/R) sum_r y_r y_r^H.
HermitianMatrix sample_covariance(const CsiSnapshotBatch& batch);

/// Pseudo-spectrum on the grid lower, lower + res, ..., <= upper.
std::vector<double> doa_spectrum(const HermitianMatrix& covariance, const ArrayGeometry& geometry,
                                 int num_sources, const std::vector<double>& grid_deg, DoaMethod method);

/// Picks the K largest local maxima at least min_peak_separation_deg apart
/// (greedy by value, lower angle first on ties), padding with the next-largest
/// grid points if needed. Requires 1 <= K < N.
DoaEstimate estimate_doas(const HermitianMatrix& covariance, const ArrayGeometry& geometry,
                          int num_sources, const EstimationOptions& options = {});

inline DoaEstimate estimate_doas(const HermitianMatrix& covariance, const ArrayGeometry& geometry,
                                 int num_sources, double grid_resolution_deg) {
  EstimationOptions options;
  options.grid_resolution_deg = grid_resolution_deg;
  return estimate_doas(covariance, geometry, num_sources, options);
}

}  // namespace maevo
