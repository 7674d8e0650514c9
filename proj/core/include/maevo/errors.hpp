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

#include <optional>
#include <stdexcept>
#include <string>

namespace maevo {

/// Malformed input value: wrong dimensions, violated type invariant, bad field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (e.g. angle not in (0, 180)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Constraint set or configuration that admits no feasible solution.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual,
                   std::optional<int> restart_index = std::nullopt)
      : std::runtime_error(what), last_residual_(last_residual), restart_index_(restart_index) {}

  double last_residual() const noexcept { return last_residual_; }
  std::optional<int> restart_index() const noexcept { return restart_index_; }

 private:
  double last_residual_;
  std::optional<int> restart_index_;
};

/// Lifecycle stage machine misuse (agent invoked out of turn, report/stage mismatch).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace maevo
