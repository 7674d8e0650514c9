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
// Reference computations used as test oracles. None of them call into the
// library's numerical routines; they work from the defining formulas.

#include <complex>
#include <span>
#include <vector>

#include "maevo/array.hpp"

namespace maevo::oracle {

using cd = std::complex<double>;

/// exp(j 2 pi x cos(theta) / lambda), computed per entry with std::polar.
std::vector<cd> steering(std::span<const double> positions, double wavelength, double angle_deg);

/// Row-major sum of outer products, entry by entry.
std::vector<cd> outer_product_sum(std::span<const double> positions, double wavelength,
                                  std::span<const double> angles_deg);

/// sum_k |sum_n conj(w_n) a_k[n]|^2.
double direct_sum_gain(std::span<const double> positions, double wavelength, std::span<const cd> w,
                       std::span<const double> angles_deg);

/// Eigenvalues of a dense Hermitian matrix (ascending) from Eigen's self-adjoint solver.
std::vector<double> dense_eigenvalues(std::size_t n, std::span<const cd> row_major);
double dense_max_eigenvalue(std::size_t n, std::span<const cd> row_major);

/// Largest root of the 2x2 characteristic polynomial [[a, b], [conj b, d]].
double closed_form_2x2_max(double a, cd b, double d);

/// Nearest point of {x2 - x1 >= d, x3 - x2 >= d, |x_i| <= B} found by
/// enumerating every active set, solving the KKT system of each and keeping
/// the closest feasible candidate.
std::vector<double> active_set_projection_3(std::span<const double> raw, double min_spacing, double bound);

/// Central difference of the frozen-weight gain along each coordinate.
std::vector<double> central_difference_gradient(std::span<const double> positions, double wavelength,
                                                std::span<const cd> w, std::span<const double> angles_deg,
                                                double h);

/// Best two-element sum gain over separations on a grid of `step` meters.
/// For N = 2 the optimal gain is K + |sum_k exp(-j alpha_k delta)| for separation delta.
double two_element_grid_optimum(double wavelength, double min_spacing, double bound,
                                std::span<const double> angles_deg, double step);

/// a(theta)^H R a(theta) / N by direct summation.
double bartlett_value(std::span<const cd> covariance, std::span<const double> positions, double wavelength,
                      double angle_deg);

}  // namespace maevo::oracle
