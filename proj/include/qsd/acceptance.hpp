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

// The fifteen end-to-end acceptance checks. Each one recomputes its reference
// values from closed forms or an independent route and reports the measured
// defects next to the verdict.

#ifndef QSD_ACCEPTANCE_HPP_
#define QSD_ACCEPTANCE_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsd {

struct CriterionResult {
  int id = 0;
  std::string section;  // grouping tag used by --only
  std::string title;
  bool passed = false;
  std::string detail;
  nlohmann::json measured = nlohmann::json::object();
  double seconds = 0.0;
};

struct SuiteOptions {
  // Section tag ("3.1", "mc", ...) or a criterion number; empty runs all.
  std::optional<std::string> only;
};

int criterion_count();
std::string criterion_section(int id);

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_suite(const SuiteOptions& opts = {});

// "PASS  3 [2.1] title: detail"
std::string format_line(const CriterionResult& r);
nlohmann::json suite_to_json(const std::vector<CriterionResult>& results);

}  // namespace qsd

#endif  // QSD_ACCEPTANCE_HPP_
