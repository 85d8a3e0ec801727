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

// qsdcert command-line frontend. Kept apart from main() so tests can drive it
// with in-memory streams.
//
// Exit codes: 0 success, 1 usage, 2 model, 3 solver, 4 statistics,
// 5 verification failure.

#ifndef QSDCERT_CLI_HPP_
#define QSDCERT_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace qsdcert {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitModel = 2,
  kExitSolver = 3,
  kExitStatistics = 4,
  kExitVerifyFailed = 5,
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsdcert

#endif  // QSDCERT_CLI_HPP_
