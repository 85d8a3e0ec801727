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

// JSON model files.
//
//   {"kind": "continuous", "states": [...], "rates": [[...]], "killing": [...], "meta": {...}}
//   {"kind": "discrete",   "states": [...], "sub":   [[...]], "absorb":  [...], "meta": {...}}
//   {"builtin": "bd_uniform:N=4"}   or   {"builtin": "builtin:bd_uniform?N=4"}
//
// Matrices are row-major lists of rows. Numbers are written with enough digits
// to round-trip exactly.

#ifndef QSD_MODEL_IO_HPP_
#define QSD_MODEL_IO_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "qsd/chain.hpp"

namespace qsd {

struct BuiltinSpec {
  std::string name;
  std::map<std::string, double> params;
};

// Accepts "name", "name:k=v,k=v" and "builtin:name?k=v&k=v".
BuiltinSpec parse_builtin_spec(const std::string& spec);
AbsorbingChain load_builtin(const std::string& spec);

AbsorbingChain parse_model(const std::string& text);
std::string serialize_model(const AbsorbingChain& chain);

AbsorbingChain load_model_file(const std::string& path);

// FNV-1a of the serialized model, as 16 hex digits.
std::string model_hash(const AbsorbingChain& chain);
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace qsd

#endif  // QSD_MODEL_IO_HPP_
