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

#include "maevo/doa.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maevo/errors.hpp"

namespace maevo {
namespace {

constexpr double kFlatSpectrumFraction = 0.01;

std::vector<double> make_grid(const EstimationOptions& o) {
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double angle = o.angle_bounds.lower_deg + static_cast<double>(i) * o.grid_resolution_deg;
    if (angle > o.angle_bounds.upper_deg + 1e-9) break;
    grid.push_back(angle);
  }
  return grid;
}

/// Noise-subspace projector E_n E_n^H, row-major.
ComplexVector noise_projector(const HermitianMatrix& covariance, int num_sources) {
  const auto n = static_cast<Eigen::Index>(covariance.size());
  Eigen::MatrixXcd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      r(i, j) = covariance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  // Eigenvalues come back ascending, so the noise subspace is the leading block.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r);
  const Eigen::MatrixXcd en = solver.eigenvectors().leftCols(n - num_sources);
  const Eigen::MatrixXcd proj = en * en.adjoint();
  ComplexVector out(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)] = proj(i, j);
  }
  return out;
}

}  // namespace

std::string_view to_string(DoaMethod m) {
  return m == DoaMethod::Music ? "music" : "bartlett";
}

std::optional<DoaMethod> parse_doa_method(std::string_view text) {
  if (text == "bartlett" || text == "Bartlett") return DoaMethod::Bartlett;
  if (text == "music" || text == "Music" || text == "MUSIC") return DoaMethod::Music;
  return std::nullopt;
}

HermitianMatrix sample_covariance(const CsiSnapshotBatch& batch) {
  if (batch.num_snapshots < 1) throw ValidationError("CSI batch has no snapshots");
  if (batch.snapshots.size() != batch.num_snapshots * batch.num_elements) {
    throw ValidationError("CSI batch rows do not match num_elements");
  }
  HermitianMatrix r(batch.num_elements);
  for (std::size_t s = 0; s < batch.num_snapshots; ++s) r.add_outer_product(batch.snapshot(s));
  r.scale(1.0 / static_cast<double>(batch.num_snapshots));
  return r;
}

std::vector<double> doa_spectrum(const HermitianMatrix& covariance, const ArrayGeometry& geometry,
                                 int num_sources, const std::vector<double>& grid_deg, DoaMethod method) {
  const std::size_t n = geometry.size();
  if (covariance.size() != n) throw ValidationError("covariance size does not match the array");

  std::vector<double> spectrum;
  spectrum.reserve(grid_deg.size());
  if (method == DoaMethod::Bartlett) {
    for (double angle : grid_deg) {
      spectrum.push_back(covariance.quadratic_form(steering_vector(geometry, angle)) /
                         static_cast<double>(n));
    }
    return spectrum;
  }

  const HermitianMatrix projector = HermitianMatrix::from_dense(n, noise_projector(covariance, num_sources), 1e-9);
  for (double angle : grid_deg) {
    const double leakage = std::max(projector.quadratic_form(steering_vector(geometry, angle)), 1e-300);
    spectrum.push_back(static_cast<double>(n) / leakage);
  }
  return spectrum;
}

DoaEstimate estimate_doas(const HermitianMatrix& covariance, const ArrayGeometry& geometry,
                          int num_sources, const EstimationOptions& options) {
  const int n = static_cast<int>(geometry.size());
  if (num_sources < 1 || num_sources >= n) {
    throw ValidationError("num_sources must satisfy 1 <= K < N (K=" + std::to_string(num_sources) +
                          ", N=" + std::to_string(n) + ")");
  }
  if (!(options.grid_resolution_deg > 0.0)) throw ValidationError("grid_resolution_deg must be positive");
  if (!(options.angle_bounds.lower_deg > 0.0 && options.angle_bounds.upper_deg < 180.0 &&
        options.angle_bounds.lower_deg < options.angle_bounds.upper_deg)) {
    throw ValidationError("estimation angle bounds must satisfy 0 < lower < upper < 180");
  }

  std::vector<double> grid = make_grid(options);
  std::vector<double> p = doa_spectrum(covariance, geometry, num_sources, grid, options.method);
  const std::size_t g = grid.size();

  auto by_value = [&](std::size_t a, std::size_t b) {
    if (p[a] != p[b]) return p[a] > p[b];
    return a < b;
  };
  const double min_sep = options.min_peak_separation_deg - 1e-9;
  std::vector<std::size_t> chosen;
  auto separated = [&](std::size_t i) {
    return std::all_of(chosen.begin(), chosen.end(),
                       [&](std::size_t j) { return std::abs(grid[i] - grid[j]) >= min_sep; });
  };
  const auto k = static_cast<std::size_t>(num_sources);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < g; ++i) {
    const bool left = i == 0 || p[i] > p[i - 1];
    const bool right = i + 1 == g || p[i] >= p[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), by_value);
  for (std::size_t i : peaks) {
    if (chosen.size() == k) break;
    if (separated(i)) chosen.push_back(i);
  }

  bool low_confidence = chosen.size() < k;
  if (chosen.size() < k) {
    std::vector<std::size_t> order(g);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), by_value);
    for (std::size_t i : order) {
      if (chosen.size() == k) break;
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end() && separated(i)) chosen.push_back(i);
    }
    for (std::size_t i : order) {
      if (chosen.size() == k) break;
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
    }
  }

  const auto [min_it, max_it] = std::minmax_element(p.begin(), p.end());
  if (*max_it - *min_it <= kFlatSpectrumFraction * std::abs(*max_it)) low_confidence = true;

  std::sort(chosen.begin(), chosen.end());
  std::vector<double> angles;
  std::vector<double> peak_values;
  for (std::size_t i : chosen) {
    angles.push_back(grid[i]);
    peak_values.push_back(p[i]);
  }

  DoaEstimate estimate;
  estimate.angles = DoASet(std::move(angles));
  estimate.grid_deg = std::move(grid);
  estimate.spectrum = std::move(p);
  estimate.grid_resolution_deg = options.grid_resolution_deg;
  estimate.peak_values = std::move(peak_values);
  estimate.low_confidence = low_confidence;
  return estimate;
}

}  // namespace maevo
