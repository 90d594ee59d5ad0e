// Copyright 2026 The qhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "qhist/core/errors.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist::cli {

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Parameter tree read from a scenario: scalars keep their source text.
struct Value {
  enum class Kind { null, scalar, list, map };
  Kind kind = Kind::null;
  std::string scalar;
  std::vector<Value> items;
  std::vector<std::pair<std::string, Value>> entries;  // source order

  bool operator==(const Value&) const = default;

  static Value of(std::string s) {
    Value v;
    v.kind = Kind::scalar;
    v.scalar = std::move(s);
    return v;
  }

  static Value list(std::vector<Value> xs) {
    Value v;
    v.kind = Kind::list;
    v.items = std::move(xs);
    return v;
  }

  static Value map() {
    Value v;
    v.kind = Kind::map;
    return v;
  }

  bool is_scalar() const { return kind == Kind::scalar; }
  bool is_list() const { return kind == Kind::list; }
  bool is_map() const { return kind == Kind::map; }

  const Value* find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  void set(const std::string& key, Value v) {
    for (auto& [k, x] : entries) {
      if (k == key) {
        x = std::move(v);
        return;
      }
    }
    entries.emplace_back(key, std::move(v));
  }
};

inline Value from_yaml(const YAML::Node& n, const std::string& where) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return Value{};
    case YAML::NodeType::Scalar:
      return Value::of(n.Scalar());
    case YAML::NodeType::Sequence: {
      Value v;
      v.kind = Value::Kind::list;
      for (std::size_t i = 0; i < n.size(); ++i) v.items.push_back(from_yaml(n[i], where + "[" + std::to_string(i) + "]"));
      return v;
    }
    case YAML::NodeType::Map: {
      Value v = Value::map();
      for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        if (v.find(key)) throw ParseError(where + ": duplicate key '" + key + "'");
        v.entries.emplace_back(key, from_yaml(kv.second, where + "." + key));
      }
      return v;
    }
  }
  throw ParseError(where + ": unsupported YAML node");
}

inline void to_yaml(YAML::Emitter& out, const Value& v) {
  switch (v.kind) {
    case Value::Kind::null:
      out << YAML::Null;
      break;
    case Value::Kind::scalar:
      out << v.scalar;
      break;
    case Value::Kind::list:
      out << YAML::Flow << YAML::BeginSeq;
      for (const auto& x : v.items) to_yaml(out, x);
      out << YAML::EndSeq;
      break;
    case Value::Kind::map:
      out << YAML::BeginMap;
      for (const auto& [k, x] : v.entries) {
        out << YAML::Key << k << YAML::Value;
        to_yaml(out, x);
      }
      out << YAML::EndMap;
      break;
  }
}

// ---- scalar conversions ------------------------------------------------

inline double parse_double(std::string_view s, const std::string& where) {
  double x = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(where + ": '" + std::string(s) + "' is not a number");
  }
  return x;
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i" (spaces ignored).
inline Complex parse_complex(std::string_view text, const std::string& where) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  if (s.empty()) throw ParseError(where + ": empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_double(s, where), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_double(re, where), parse_double(im, where)};
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

inline std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  const std::string im = format_double(std::abs(z.imag())) + "i";
  if (z.real() == 0.0) return (z.imag() < 0 ? "-" : "") + im;
  return format_double(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + im;
}

// ---- typed accessors ---------------------------------------------------

inline const Value& require(const Value& map, std::string_view key, const std::string& where) {
  const Value* v = map.find(key);
  if (!v || v->kind == Value::Kind::null) throw ParseError(where + ": missing '" + std::string(key) + "'");
  return *v;
}

inline void allow_keys(const Value& map, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!map.is_map()) throw ParseError(where + ": expected a mapping");
  for (const auto& [k, v] : map.entries) {
    bool ok = false;
    for (auto allowed : keys) ok = ok || k == allowed;
    if (!ok) throw ParseError(where + ": unknown key '" + k + "'");
  }
}

inline const std::string& as_scalar(const Value& v, const std::string& where) {
  if (!v.is_scalar()) throw ParseError(where + ": expected a scalar");
  return v.scalar;
}

inline double as_double(const Value& v, const std::string& where) { return parse_double(as_scalar(v, where), where); }

inline std::int64_t as_int(const Value& v, const std::string& where) {
  const std::string& s = as_scalar(v, where);
  std::int64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(where + ": '" + s + "' is not an integer");
  return x;
}

inline std::size_t as_size(const Value& v, const std::string& where) {
  const std::int64_t x = as_int(v, where);
  if (x < 0) throw ParseError(where + ": expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

inline bool as_bool(const Value& v, const std::string& where) {
  const std::string& s = as_scalar(v, where);
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  throw ParseError(where + ": '" + s + "' is not a boolean");
}

inline Complex as_complex(const Value& v, const std::string& where) { return parse_complex(as_scalar(v, where), where); }

inline std::vector<std::string> as_strings(const Value& v, const std::string& where) {
  if (v.is_scalar()) return {v.scalar};
  if (!v.is_list()) throw ParseError(where + ": expected a list of scalars");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.items.size(); ++i) out.push_back(as_scalar(v.items[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Vector as_vector(const Value& v, const std::string& where) {
  if (!v.is_list()) throw ParseError(where + ": expected a list of complex numbers");
  Vector out(static_cast<Eigen::Index>(v.items.size()));
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = as_complex(v.items[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

/// Row-major: a list of rows, each a list of complex numbers.
inline Matrix as_matrix(const Value& v, const std::string& where) {
  if (!v.is_list() || v.items.empty()) throw ParseError(where + ": expected a non-empty list of rows");
  const std::size_t rows = v.items.size();
  Matrix out;
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = as_vector(v.items[r], where + "[" + std::to_string(r) + "]");
    if (r == 0) out.resize(static_cast<Eigen::Index>(rows), row.size());
    if (row.size() != out.cols()) throw ParseError(where + ": ragged matrix rows");
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

inline Value vector_value(const Vector& x) {
  Value v;
  v.kind = Value::Kind::list;
  for (Eigen::Index i = 0; i < x.size(); ++i) v.items.push_back(Value::of(format_complex(x(i))));
  return v;
}

inline Value matrix_value(const Matrix& m) {
  Value v;
  v.kind = Value::Kind::list;
  for (Eigen::Index r = 0; r < m.rows(); ++r) v.items.push_back(vector_value(m.row(r).transpose()));
  return v;
}

inline Value strings_value(const std::vector<std::string>& xs) {
  Value v;
  v.kind = Value::Kind::list;
  for (const auto& x : xs) v.items.push_back(Value::of(x));
  return v;
}

}  // namespace qhist::cli
