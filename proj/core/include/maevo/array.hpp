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

// Complex array-response math for a linear array of (possibly movable)
// elements: steering vectors, sum beam gain and the Hermitian machinery
// used by the weight optimizer.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace maevo {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299'792'458.0;
/// 2.4 GHz carrier, rounded.
inline constexpr double kDefaultWavelength = 0.125;
inline constexpr int kDefaultNumElements = 8;

/// Feasible-set parameters shared by every geometry of one array.
struct ArrayConstraints {
  double wavelength = kDefaultWavelength;
  int num_elements = kDefaultNumElements;
  double min_spacing = kDefaultWavelength / 2;
  double position_bound = 5 * kDefaultWavelength;

  /// Half-wavelength spacing and a +/-5 wavelength window scaled to `wavelength`.
  static ArrayConstraints for_wavelength(double wavelength, int num_elements = kDefaultNumElements);

  /// Throws ValidationError when a field is non-positive or non-finite.
  void validate() const;
  /// True when `num_elements` elements fit inside the window at `min_spacing`.
  bool feasible() const;
  /// validate() plus ConfigurationError when the set is empty.
  void require_feasible() const;

  friend bool operator==(const ArrayConstraints&, const ArrayConstraints&) = default;
};

/// Element positions along the array axis in meters, checked against the constraints.
class ArrayGeometry {
 public:
  /// Throws ValidationError if the positions violate ordering, spacing, bound or count.
  ArrayGeometry(ArrayConstraints constraints, std::vector<double> positions);

  /// Uniformly spaced array centred at 0 (spacing max(lambda/2, min_spacing)).
  static ArrayGeometry uniform(const ArrayConstraints& constraints);

  const ArrayConstraints& constraints() const noexcept { return constraints_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  std::size_t size() const noexcept { return positions_.size(); }
  double wavelength() const noexcept { return constraints_.wavelength; }

  ArrayGeometry with_positions(std::vector<double> positions) const {
    return ArrayGeometry(constraints_, std::move(positions));
  }

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;

 private:
  ArrayConstraints constraints_;
  std::vector<double> positions_;
};

/// K arrival angles in degrees, measured from the array axis, each in (0, 180).
class DoASet {
 public:
  /// Throws ValidationError on empty input, duplicates or angles outside (0, 180).
  explicit DoASet(std::vector<double> angles_deg);

  const std::vector<double>& angles() const noexcept { return angles_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double operator[](std::size_t k) const { return angles_[k]; }

  friend bool operator==(const DoASet&, const DoASet&) = default;

 private:
  std::vector<double> angles_;
};

/// Dense N x N complex matrix that is Hermitian by construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n = 0);

  /// Row-major entries; throws ValidationError unless Hermitian within `tolerance`.
  /// The stored matrix is symmetrized exactly.
  static HermitianMatrix from_dense(std::size_t n, std::span<const Complex> row_major,
                                    double tolerance = 1e-12);

  std::size_t size() const noexcept { return n_; }
  Complex operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// this += scale * v v^H, written so that the result stays exactly Hermitian.
  void add_outer_product(std::span<const Complex> v, double scale = 1.0);
  void scale(double factor);

  ComplexVector multiply(std::span<const Complex> v) const;
  /// Re(w^H A w).
  double quadratic_form(std::span<const Complex> w) const;
  double trace() const;

 private:
  std::size_t n_;
  std::vector<Complex> data_;
};

struct GainValue {
  double linear = 0.0;
  double db = 0.0;
};

/// 10 log10(linear), or -infinity when linear < 1e-300.
double to_db(double linear);

double norm(std::span<const Complex> v);
/// Euclidean-normalized copy; throws ValidationError for the zero vector.
ComplexVector normalized(std::span<const Complex> v);

/// Entry n is exp(j (2 pi / lambda) x_n cos(theta)). Throws DomainError unless 0 < angle < 180.
ComplexVector steering_vector(const ArrayGeometry& geometry, double angle_deg);

/// A = sum_k a(theta_k) a(theta_k)^H, so that the sum gain equals w^H A w.
HermitianMatrix gain_matrix(const ArrayGeometry& geometry, const DoASet& doas);

/// G = sum_k |w^H a(theta_k)|^2 for a unit-norm weight vector.
GainValue sum_beam_gain(const ArrayGeometry& geometry, std::span<const Complex> weights,
                        const DoASet& doas);

struct Eigenpair {
  double eigenvalue = 0.0;
  ComplexVector eigenvector;
  int iterations = 0;
};

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 10'000;
};

/// Dominant eigenpair of a Hermitian PSD matrix by power iteration.
///
/// Starts from e_0 + 1e-3 * ones, stops once ||A v - lambda v|| <= tolerance * lambda.
/// The returned eigenvector has unit norm and its first entry with magnitude above
/// 1e-9 is real and non-negative. Throws ConvergenceError (carrying the last
/// residual) when max_iterations is exhausted.
Eigenpair principal_eigenpair(const HermitianMatrix& matrix, PowerIterationOptions options = {});

}  // namespace maevo
