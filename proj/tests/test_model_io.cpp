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

#include <doctest.h>

#include <string>

#include "qsd/error.hpp"
#include "qsd/model_io.hpp"
#include "qsd/models.hpp"

using namespace qsd;

namespace {

ErrorKind parse_error(const std::string& text, std::string* what = nullptr) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.kind();
  }
  FAIL("parse succeeded");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("model_io") {
  TEST_CASE("round trip of the two-point chain") {
    const AbsorbingChain c = two_point();
    CHECK(parse_model(serialize_model(c)) == c);
  }

  TEST_CASE("round trip of every builtin") {
    for (const auto& name : builtin_names()) {
      const AbsorbingChain c = make_builtin(name, {});
      CHECK(parse_model(serialize_model(c)) == c);
      CHECK(serialize_model(parse_model(serialize_model(c))) == serialize_model(c));
    }
    // Irrational entries survive too.
    const AbsorbingChain b = bd_biased(7, 1.0 / 3.0);
    CHECK(parse_model(serialize_model(b)) == b);
  }

  TEST_CASE("missing killing field") {
    std::string what;
    CHECK(parse_error(R"({"kind": "continuous", "states": ["a", "b"], "rates": [[0, 1], [1, 0]]})", &what) ==
          ErrorKind::SchemaError);
    CHECK(what.find("killing") != std::string::npos);
  }

  TEST_CASE("syntax errors carry a line number") {
    std::string what;
    CHECK(parse_error("{\n  \"kind\": \"continuous\",\n  oops\n}", &what) == ErrorKind::SchemaError);
    CHECK(what.find("line 3") != std::string::npos);
  }

  TEST_CASE("model-level errors propagate") {
    CHECK(parse_error(R"({"kind": "discrete", "states": ["a"], "sub": [[0.5]], "absorb": [0.6]})") ==
          ErrorKind::RowSumViolation);
    CHECK(parse_error(R"({"kind": "continuous", "states": ["a", "b"], "rates": [[0, -1], [1, 0]], "killing": [1, 1]})") ==
          ErrorKind::NegativeRate);
    CHECK(parse_error(R"({"kind": "sideways"})") == ErrorKind::SchemaError);
  }

  TEST_CASE("builtin references") {
    const AbsorbingChain a = parse_model(R"({"builtin": "bd_uniform:N=4"})");
    CHECK(std::get<ContinuousChain>(a) == bd_uniform(4));
    const AbsorbingChain b = parse_model(R"({"builtin": "builtin:bd_uniform?N=4"})");
    CHECK(a == b);
    CHECK(load_builtin("cycle:N=6") == AbsorbingChain(cycle_chain(6)));
    CHECK(load_builtin("rock_breaking") == AbsorbingChain(rock_breaking(4).chain));
  }

  TEST_CASE("builtin spec parsing") {
    const BuiltinSpec s = parse_builtin_spec("builtin:zhou_bd?N=7&p=0.25");
    CHECK(s.name == "zhou_bd");
    CHECK(s.params.at("N") == 7);
    CHECK(s.params.at("p") == 0.25);
    const BuiltinSpec t = parse_builtin_spec("bd_biased:N=3,r=0.5");
    CHECK(t.params.size() == 2);
    CHECK(parse_builtin_spec("cycle").params.empty());
    CHECK_THROWS_AS(parse_builtin_spec("cycle:N"), Error);
  }

  TEST_CASE("hash is stable and content-sensitive") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    const std::string h = model_hash(bd_uniform(4));
    CHECK(h.size() == 16);
    CHECK(h == model_hash(bd_uniform(4)));
    CHECK(h != model_hash(bd_uniform(5)));
  }

  TEST_CASE("missing file") {
    try {
      load_model_file("/nonexistent/model.json");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::Model);
    }
  }
}
