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

#include "qsd/error.hpp"

namespace qsd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NegativeRate: return "NegativeRate";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::SizeGuard: return "SizeGuard";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::PerronFailure: return "PerronFailure";
    case ErrorKind::PerronMismatch: return "PerronMismatch";
    case ErrorKind::SolverDivergence: return "SolverDivergence";
    case ErrorKind::NonStochastic: return "NonStochastic";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoPathToAbsorption: return "NoPathToAbsorption";
    case ErrorKind::CertificationFailure: return "CertificationFailure";
    case ErrorKind::BoundaryDefect: return "BoundaryDefect";
    case ErrorKind::OptimizerStall: return "OptimizerStall";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::FractionalTime: return "FractionalTime";
    case ErrorKind::TotalMassUnderflow: return "TotalMassUnderflow";
    case ErrorKind::ReferenceZero: return "ReferenceZero";
    case ErrorKind::TooFewSurvivors: return "TooFewSurvivors";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NegativeRate:
    case ErrorKind::NegativeEntry:
    case ErrorKind::RowSumViolation:
    case ErrorKind::InvalidState:
    case ErrorKind::SchemaError:
    case ErrorKind::SizeGuard:
      return ErrorCategory::Model;
    case ErrorKind::TooFewSurvivors:
      return ErrorCategory::Statistics;
    case ErrorKind::InvalidArgument:
    case ErrorKind::NegativeTime:
    case ErrorKind::FractionalTime:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Solver;
  }
}

}  // namespace qsd
