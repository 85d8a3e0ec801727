// Copyright 2026 The qsdcert Authors
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

#ifndef QSD_ERROR_HPP_
#define QSD_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsd {

enum class ErrorKind {
  // model construction and I/O
  DimensionMismatch,
  NegativeRate,
  NegativeEntry,
  RowSumViolation,
  InvalidState,
  SchemaError,
  SizeGuard,
  // solver / analysis
  NotIrreducible,
  PerronFailure,
  PerronMismatch,
  SolverDivergence,
  NonStochastic,
  NotReversible,
  NotSymmetric,
  NoPathToAbsorption,
  CertificationFailure,
  BoundaryDefect,
  OptimizerStall,
  // evolution
  NegativeTime,
  FractionalTime,
  TotalMassUnderflow,
  ReferenceZero,
  // statistics
  TooFewSurvivors,
  // misc
  InvalidArgument,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Usage, Model, Solver, Statistics };

std::string_view to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

// Throws Error(kind, message) unless cond holds.
inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) throw Error(kind, message);
}

}  // namespace qsd

#endif  // QSD_ERROR_HPP_
