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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhist/cli/analyses.hpp"
#include "qhist/cli/report.hpp"
#include "qhist/cli/scenario.hpp"

namespace qhist::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitParse = 2,
  kExitInvariant = 3,
  kExitPrecondition = 4,
  kExitTolerance = 5,
};

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::vector<std::pair<std::string, double>> tol_overrides;
  bool write = true;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<Report> reports;
  std::vector<std::string> files;
};

/// "KEY=VAL" with KEY one of the report tolerance keys.
inline std::pair<std::string, double> parse_tol_override(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError("tolerance override '" + s + "' is not KEY=VAL");
  const std::string key = s.substr(0, eq);
  bool known = false;
  for (const auto& e : Tolerances{}.entries()) known = known || e.first == key;
  if (!known) throw ParseError("unknown tolerance key '" + key + "'");
  return {key, parse_double(s.substr(eq + 1), "--tol-override " + key)};
}

namespace detail {

inline RunResult fail(RunResult r, int code, const std::string& msg) {
  r.exit_code = code;
  r.message = msg;
  return r;
}

}  // namespace detail

inline RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {}) {
  RunResult res;
  Format format = Format::json_lines;
  Tolerances tol;
  std::optional<HistorySet> hs;
  std::vector<Analysis> analyses;
  try {
    format = parse_format(opt.format.value_or(sc.format.empty() ? "json-lines" : sc.format));
    tol = scenario_tolerances(sc, opt.tol_overrides);
    hs.emplace(build_history_set(sc.model, tol));
    for (std::size_t i = 0; i < sc.analyses.size(); ++i) {
      analyses.push_back(prepare_analysis(*hs, sc.analyses[i].op, sc.analyses[i].params,
                                          "analyses[" + std::to_string(i) + "]"));
    }
  } catch (const ParseError& e) {
    return detail::fail(std::move(res), kExitParse, std::string("parse error: ") + e.what());
  } catch (const Error& e) {
    return detail::fail(std::move(res), kExitInvariant, std::string("invalid scenario: ") + e.what());
  }

  namespace fs = std::filesystem;
  const fs::path dir = opt.out_dir.value_or(sc.output_dir.empty() ? "qhist-reports" : sc.output_dir);
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    Report r;
    r.scenario = sc.name;
    r.index = i;
    r.op = sc.analyses[i].op;
    r.params = sc.analyses[i].params;
    r.tolerances = tol;
    try {
      analyses[i](r);
    } catch (const ParseError& e) {
      return detail::fail(std::move(res), kExitParse, r.op + ": " + e.what());
    } catch (const ToleranceBreach& e) {
      return detail::fail(std::move(res), kExitTolerance, r.op + ": " + e.what());
    } catch (const Error& e) {
      return detail::fail(std::move(res), kExitPrecondition, r.op + ": " + e.what());
    }
    if (opt.write) {
      std::error_code ec;
      fs::create_directories(dir, ec);
      const fs::path file = dir / report_file_name(r, format);
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << emit_report(r, format);
      if (!out) return detail::fail(std::move(res), kExitIo, "cannot write report '" + file.string() + "'");
      res.files.push_back(file.string());
    }
    res.reports.push_back(std::move(r));
  }
  return res;
}

inline RunResult run_scenario_file(const std::string& path, const RunOptions& opt = {}) {
  if (!std::ifstream(path, std::ios::binary)) {
    return detail::fail(RunResult{}, kExitIo, "cannot read scenario file '" + path + "'");
  }
  Scenario sc;
  try {
    sc = load_scenario_file(path);
  } catch (const ParseError& e) {
    return detail::fail(RunResult{}, kExitParse, std::string("parse error: ") + e.what());
  } catch (const Error& e) {
    return detail::fail(RunResult{}, kExitInvariant, std::string("invalid scenario: ") + e.what());
  }
  return run_scenario(sc, opt);
}

}  // namespace qhist::cli
