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

#include "qsd/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsd/error.hpp"
#include "qsd/models.hpp"

namespace qsd {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

const json& field(const json& doc, const std::string& key) {
  if (!doc.contains(key)) schema("missing field '" + key + "'");
  return doc.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  return v.get<double>();
}

Vector read_vector(const json& doc, const std::string& key, std::size_t n) {
  const json& v = field(doc, key);
  if (!v.is_array()) schema("field '" + key + "' must be an array");
  if (v.size() != n) {
    schema("field '" + key + "' has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
  }
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], key + "[" + std::to_string(i) + "]");
  return out;
}

Matrix read_matrix(const json& doc, const std::string& key, std::size_t n) {
  const json& m = field(doc, key);
  if (!m.is_array() || m.size() != n) schema("field '" + key + "' must have " + std::to_string(n) + " rows");
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = m[i];
    const std::string where = key + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != n) schema("row " + where + " must have " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number(row[j], where + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

json write_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json write_vector(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

double parse_value(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) schema("parameter '" + key + "' has non-numeric value '" + text + "'");
  return v;
}

std::map<std::string, double> parse_params(const std::string& text, char sep) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) schema("malformed builtin parameter '" + item + "'");
    const std::string key = item.substr(0, eq);
    out[key] = parse_value(key, item.substr(eq + 1));
  }
  return out;
}

}  // namespace

BuiltinSpec parse_builtin_spec(const std::string& spec) {
  BuiltinSpec out;
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string rest = spec.substr(prefix.size());
    const auto q = rest.find('?');
    out.name = rest.substr(0, q);
    if (q != std::string::npos) out.params = parse_params(rest.substr(q + 1), '&');
  } else {
    const auto c = spec.find(':');
    out.name = spec.substr(0, c);
    if (c != std::string::npos) out.params = parse_params(spec.substr(c + 1), ',');
  }
  if (out.name.empty()) schema("empty builtin name");
  return out;
}

AbsorbingChain load_builtin(const std::string& spec) {
  const BuiltinSpec b = parse_builtin_spec(spec);
  return make_builtin(b.name, b.params);
}

AbsorbingChain parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    schema("invalid JSON at line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) schema("model must be a JSON object");
  if (doc.contains("builtin")) {
    if (!doc["builtin"].is_string()) schema("field 'builtin' must be a string");
    return load_builtin(doc["builtin"].get<std::string>());
  }
  const json& kind = field(doc, "kind");
  if (!kind.is_string()) schema("field 'kind' must be a string");
  const json& st = field(doc, "states");
  if (!st.is_array() || st.empty()) schema("field 'states' must be a nonempty array");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (!st[i].is_string()) schema("states[" + std::to_string(i) + "] must be a string");
    labels.push_back(st[i].get<std::string>());
  }
  const std::size_t n = labels.size();
  if (kind == "continuous") {
    return build_continuous(StateSpace(std::move(labels)), read_matrix(doc, "rates", n),
                            read_vector(doc, "killing", n));
  }
  if (kind == "discrete") {
    return build_discrete(StateSpace(std::move(labels)), read_matrix(doc, "sub", n), read_vector(doc, "absorb", n));
  }
  schema("field 'kind' must be \"continuous\" or \"discrete\"");
}

std::string serialize_model(const AbsorbingChain& chain) {
  json doc;
  if (const auto* c = std::get_if<ContinuousChain>(&chain)) {
    doc["kind"] = "continuous";
    doc["states"] = c->states().labels();
    doc["rates"] = write_matrix(c->rates());
    doc["killing"] = write_vector(c->killing());
  } else {
    const auto& d = std::get<DiscreteChain>(chain);
    doc["kind"] = "discrete";
    doc["states"] = d.states().labels();
    doc["sub"] = write_matrix(d.sub());
    doc["absorb"] = write_vector(d.absorb());
  }
  doc["meta"] = json::object();
  return doc.dump(2);
}

AbsorbingChain load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string model_hash(const AbsorbingChain& chain) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_model(chain))));
  return buf;
}

}  // namespace qsd
