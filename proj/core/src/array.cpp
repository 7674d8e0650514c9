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

#include "maevo/array.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "maevo/errors.hpp"

namespace maevo {
namespace {

constexpr double kGeometryTolerance = 1e-12;
constexpr double kUnitNormTolerance = 1e-9;
constexpr double kDbFloor = 1e-300;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ArrayConstraints ArrayConstraints::for_wavelength(double wavelength, int num_elements) {
  return ArrayConstraints{wavelength, num_elements, wavelength / 2, 5 * wavelength};
}

void ArrayConstraints::validate() const {
  if (!positive_finite(wavelength)) throw ValidationError("wavelength must be positive and finite");
  if (num_elements < 1) throw ValidationError("num_elements must be at least 1");
  if (!positive_finite(min_spacing)) throw ValidationError("min_spacing must be positive and finite");
  if (!positive_finite(position_bound)) {
    throw ValidationError("position_bound must be positive and finite");
  }
}

bool ArrayConstraints::feasible() const {
  return (num_elements - 1) * min_spacing <= 2 * position_bound + kGeometryTolerance;
}

void ArrayConstraints::require_feasible() const {
  validate();
  if (!feasible()) {
    std::ostringstream os;
    os << "min_spacing: " << num_elements << " elements at spacing " << min_spacing
       << " m do not fit inside +/-" << position_bound << " m";
    throw ConfigurationError(os.str());
  }
}

ArrayGeometry::ArrayGeometry(ArrayConstraints constraints, std::vector<double> positions)
    : constraints_(constraints), positions_(std::move(positions)) {
  constraints_.validate();
  if (positions_.size() != static_cast<std::size_t>(constraints_.num_elements)) {
    throw ValidationError("geometry has " + std::to_string(positions_.size()) +
                          " positions but num_elements is " +
                          std::to_string(constraints_.num_elements));
  }
  for (std::size_t n = 0; n < positions_.size(); ++n) {
    const double p = positions_[n];
    if (!std::isfinite(p) || std::abs(p) > constraints_.position_bound + kGeometryTolerance) {
      throw ValidationError("position " + std::to_string(n) + " outside the array window");
    }
    if (n > 0) {
      const double gap = p - positions_[n - 1];
      if (!(gap > 0.0) || gap < constraints_.min_spacing - kGeometryTolerance) {
        throw ValidationError("positions " + std::to_string(n - 1) + " and " + std::to_string(n) +
                              " violate the minimum spacing");
      }
    }
  }
}

ArrayGeometry ArrayGeometry::uniform(const ArrayConstraints& constraints) {
  constraints.validate();
  const double spacing = std::max(constraints.wavelength / 2, constraints.min_spacing);
  const int n = constraints.num_elements;
  if ((n - 1) * spacing > 2 * constraints.position_bound + kGeometryTolerance) {
    throw ConfigurationError("uniform reference array does not fit inside the position bound");
  }
  std::vector<double> positions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = (i - (n - 1) / 2.0) * spacing;
  return ArrayGeometry(constraints, std::move(positions));
}

DoASet::DoASet(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
  if (angles_.empty()) throw ValidationError("DoA set must contain at least one angle");
  for (std::size_t k = 0; k < angles_.size(); ++k) {
    const double a = angles_[k];
    if (!std::isfinite(a) || a <= 0.0 || a >= 180.0) {
      throw ValidationError("angle " + std::to_string(a) + " outside (0, 180) degrees");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (angles_[j] == a) throw ValidationError("DoA set contains duplicate angles");
    }
  }
}

HermitianMatrix::HermitianMatrix(std::size_t n) : n_(n), data_(n * n, Complex{}) {}

HermitianMatrix HermitianMatrix::from_dense(std::size_t n, std::span<const Complex> row_major,
                                            double tolerance) {
  if (row_major.size() != n * n) throw ValidationError("dense matrix has the wrong number of entries");
  HermitianMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      const Complex upper = row_major[r * n + c];
      const Complex lower = row_major[c * n + r];
      if (std::abs(upper - std::conj(lower)) > tolerance) {
        throw ValidationError("matrix is not Hermitian");
      }
      if (r == c) {
        m.data_[r * n + r] = Complex(upper.real(), 0.0);
      } else {
        m.data_[r * n + c] = upper;
        m.data_[c * n + r] = std::conj(upper);
      }
    }
  }
  return m;
}

void HermitianMatrix::add_outer_product(std::span<const Complex> v, double scale) {
  if (v.size() != n_) throw ValidationError("outer product dimension mismatch");
  for (std::size_t r = 0; r < n_; ++r) {
    data_[r * n_ + r] += Complex(scale * std::norm(v[r]), 0.0);
    for (std::size_t c = r + 1; c < n_; ++c) {
      const Complex entry = scale * v[r] * std::conj(v[c]);
      data_[r * n_ + c] += entry;
      data_[c * n_ + r] += std::conj(entry);
    }
  }
}

void HermitianMatrix::scale(double factor) {
  for (auto& entry : data_) entry *= factor;
}

ComplexVector HermitianMatrix::multiply(std::span<const Complex> v) const {
  if (v.size() != n_) throw ValidationError("matrix-vector dimension mismatch");
  ComplexVector out(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    Complex acc{};
    for (std::size_t c = 0; c < n_; ++c) acc += data_[r * n_ + c] * v[c];
    out[r] = acc;
  }
  return out;
}

double HermitianMatrix::quadratic_form(std::span<const Complex> w) const {
  const ComplexVector aw = multiply(w);
  Complex acc{};
  for (std::size_t n = 0; n < n_; ++n) acc += std::conj(w[n]) * aw[n];
  return acc.real();
}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t n = 0; n < n_; ++n) t += data_[n * n_ + n].real();
  return t;
}

double to_db(double linear) {
  if (linear < kDbFloor) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

ComplexVector normalized(std::span<const Complex> v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw ValidationError("cannot normalize a zero vector");
  ComplexVector out(v.begin(), v.end());
  for (auto& x : out) x /= n;
  return out;
}

ComplexVector steering_vector(const ArrayGeometry& geometry, double angle_deg) {
  if (!(angle_deg > 0.0 && angle_deg < 180.0)) {
    throw DomainError("steering angle " + std::to_string(angle_deg) + " outside (0, 180) degrees");
  }
  const double alpha = 2.0 * kPi / geometry.wavelength() * std::cos(angle_deg * kPi / 180.0);
  ComplexVector a;
  a.reserve(geometry.size());
  for (double x : geometry.positions()) a.push_back(std::polar(1.0, alpha * x));
  return a;
}

HermitianMatrix gain_matrix(const ArrayGeometry& geometry, const DoASet& doas) {
  HermitianMatrix a(geometry.size());
  for (double angle : doas.angles()) a.add_outer_product(steering_vector(geometry, angle));
  return a;
}

GainValue sum_beam_gain(const ArrayGeometry& geometry, std::span<const Complex> weights,
                        const DoASet& doas) {
  if (weights.size() != geometry.size()) {
    throw ValidationError("weight vector has " + std::to_string(weights.size()) +
                          " entries for a " + std::to_string(geometry.size()) + "-element array");
  }
  if (std::abs(norm(weights) - 1.0) > kUnitNormTolerance) {
    throw ValidationError("beamforming weights must have unit norm");
  }
  double total = 0.0;
  for (double angle : doas.angles()) {
    const ComplexVector a = steering_vector(geometry, angle);
    Complex response{};
    for (std::size_t n = 0; n < a.size(); ++n) response += std::conj(weights[n]) * a[n];
    total += std::norm(response);
  }
  return GainValue{total, to_db(total)};
}

Eigenpair principal_eigenpair(const HermitianMatrix& matrix, PowerIterationOptions options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("power iteration tolerance must be positive");
  if (options.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  const std::size_t n = matrix.size();
  if (n == 0) throw ValidationError("cannot take the eigenpair of an empty matrix");

  ComplexVector v(n, Complex(1e-3, 0.0));
  v[0] += 1.0;
  v = normalized(v);

  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    ComplexVector av = matrix.multiply(v);
    Complex rq{};
    for (std::size_t i = 0; i < n; ++i) rq += std::conj(v[i]) * av[i];
    const double lambda = rq.real();

    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += std::norm(av[i] - lambda * v[i]);
    residual = std::sqrt(r2);

    if (residual <= options.tolerance * lambda) {
      for (std::size_t i = 0; i < n; ++i) {
        const double magnitude = std::abs(v[i]);
        if (magnitude > 1e-9) {
          const Complex phase = std::conj(v[i]) / magnitude;
          for (auto& x : v) x *= phase;
          v[i] = Complex(magnitude, 0.0);
          break;
        }
      }
      return Eigenpair{lambda, std::move(v), it};
    }

    const double scale = norm(av);
    if (!(scale > 0.0)) {
      // v landed in the null space of a non-zero matrix; nudge it off.
      for (std::size_t i = 0; i < n; ++i) av[i] = v[i] + Complex(1e-3 * static_cast<double>(i + 1), 0.0);
      v = normalized(av);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = av[i] / scale;
  }
  throw ConvergenceError("power iteration did not converge after " +
                             std::to_string(options.max_iterations) + " iterations",
                         residual);
}

}  // namespace maevo
