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

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhist/cli/value.hpp"
#include "qhist/core/tolerances.hpp"

namespace qhist::cli {

inline constexpr const char* kReportSchema = "qhist-report/1";

enum class Format { json_lines, csv };

inline Format parse_format(const std::string& s) {
  if (s == "json-lines" || s == "jsonl") return Format::json_lines;
  if (s == "csv") return Format::csv;
  throw ParseError("unsupported report format '" + s + "' (json-lines or csv)");
}

inline const char* format_extension(Format f) { return f == Format::csv ? ".csv" : ".jsonl"; }

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

inline Cell cell(bool x) { return x; }
inline Cell cell(double x) { return x; }
inline Cell cell(std::size_t x) { return static_cast<std::int64_t>(x); }
inline Cell cell(int x) { return static_cast<std::int64_t>(x); }
inline Cell cell(std::string x) { return x; }
inline Cell cell(const char* x) { return std::string(x); }
inline Cell cell(Cell c) { return c; }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table(std::string n, std::vector<std::string> cols) : name(std::move(n)), columns(std::move(cols)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("report row width mismatch in table '" + name + "'");
    rows.push_back(std::move(row));
  }
};

/// One analysis result. The first table is the one-row summary.
struct Report {
  std::string scenario;
  std::size_t index = 0;
  std::string op;
  Value params = Value::map();
  Tolerances tolerances;
  std::vector<Table> tables;

  Table& table(std::string name, std::vector<std::string> cols) {
    tables.emplace_back(std::move(name), std::move(cols));
    return tables.back();
  }
};

/// Summary table built key by key.
struct Summary {
  std::vector<std::string> keys;
  std::vector<Cell> values;

  template <class T>
  Summary& put(std::string k, T v) {
    keys.push_back(std::move(k));
    values.push_back(cell(std::move(v)));
    return *this;
  }
  Summary& complex(const std::string& k, Complex z) {
    put(k + "_re", z.real());
    return put(k + "_im", z.imag());
  }
  void into(Report& r) {
    Table t("summary", keys);
    t.add(values);
    r.tables.insert(r.tables.begin(), std::move(t));
  }
};

/// Row-major (row, col, re, im) table.
inline void matrix_table(Report& r, const std::string& name, const Matrix& m) {
  Table& t = r.table(name, {"row", "col", "re", "im"});
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      t.add({cell(static_cast<std::size_t>(i)), cell(static_cast<std::size_t>(j)), cell(m(i, j).real()),
             cell(m(i, j).imag())});
    }
  }
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson to_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::null:
      return nullptr;
    case Value::Kind::scalar:
      return v.scalar;
    case Value::Kind::list: {
      ojson a = ojson::array();
      for (const auto& x : v.items) a.push_back(to_json(x));
      return a;
    }
    case Value::Kind::map: {
      ojson o = ojson::object();
      for (const auto& [k, x] : v.entries) o[k] = to_json(x);
      return o;
    }
  }
  return nullptr;
}

inline ojson to_json(const Cell& c) {
  return std::visit(
      [](const auto& x) -> ojson {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else return x;
      },
      c);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string to_csv(const Cell& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_double(x);
        else return csv_escape(x);
      },
      c);
}

}  // namespace detail

inline std::string emit_json_lines(const Report& r) {
  using detail::ojson;
  std::ostringstream out;
  ojson head = ojson::object();
  head["schema"] = kReportSchema;
  head["record"] = "header";
  head["scenario"] = r.scenario;
  head["index"] = r.index;
  head["op"] = r.op;
  head["params"] = detail::to_json(r.params);
  ojson tol = ojson::object();
  for (const auto& [k, x] : r.tolerances.entries()) tol[k] = x;
  head["tolerances"] = tol;
  out << head.dump() << '\n';
  for (const auto& t : r.tables) {
    for (const auto& row : t.rows) {
      ojson o = ojson::object();
      o["record"] = t.name;
      for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = detail::to_json(row[i]);
      out << o.dump() << '\n';
    }
  }
  return out.str();
}

/// Metadata as '#' lines, then one block per table: a header row and data
/// rows, each led by the table name.
inline std::string emit_csv(const Report& r) {
  std::ostringstream out;
  out << "# schema," << kReportSchema << '\n';
  out << "# scenario," << detail::csv_escape(r.scenario) << '\n';
  out << "# index," << r.index << '\n';
  out << "# op," << r.op << '\n';
  out << "# params," << detail::csv_escape(detail::to_json(r.params).dump()) << '\n';
  for (const auto& [k, x] : r.tolerances.entries()) out << "# " << k << ',' << format_double(x) << '\n';
  for (const auto& t : r.tables) {
    out << "record";
    for (const auto& c : t.columns) out << ',' << detail::csv_escape(c);
    out << '\n';
    for (const auto& row : t.rows) {
      out << detail::csv_escape(t.name);
      for (const auto& c : row) out << ',' << detail::to_csv(c);
      out << '\n';
    }
  }
  return out.str();
}

inline std::string emit_report(const Report& r, Format f) {
  return f == Format::csv ? emit_csv(r) : emit_json_lines(r);
}

inline std::string report_file_name(const Report& r, Format f) {
  std::string idx = std::to_string(r.index);
  if (idx.size() < 2) idx = "0" + idx;
  return idx + "_" + r.op + format_extension(f);
}

}  // namespace qhist::cli
