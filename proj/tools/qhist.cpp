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

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhist/cli/run.hpp"
#include "qhist/cli/selftest.hpp"

int main(int argc, char** argv) {
  using namespace qhist::cli;
  CLI::App app{"qhist: consistent-histories analyses over scenario files"};
  app.require_subcommand(1);

  std::string path;
  std::string out_dir;
  std::string format;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run the analyses listed in a scenario file");
  run->add_option("scenario", path, "scenario file (.scn)")->required();
  run->add_option("--out", out_dir, "report directory");
  run->add_option("--format", format, "json-lines or csv");
  run->add_option("--tol-override", overrides, "KEY=VAL, repeatable");

  auto* list = app.add_subcommand("list-models", "list scenario model builders and analysis ops");
  auto* self = app.add_subcommand("selftest", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  if (*list) {
    std::cout << "models (dimension cap " << qhist::dimension_cap() << ", set QHIST_DIM_CAP to change)\n";
    for (const auto& m : model_catalog()) {
      std::cout << "  " << m.name << ": " << m.summary << "\n      params: " << m.params << '\n';
    }
    std::cout << "  inline: explicit space, steps, families and initial_state\n";
    std::cout << "analyses\n";
    for (const auto& o : op_catalog()) std::cout << "  " << o.name << ": " << o.params << '\n';
    return kExitOk;
  }
  if (*self) return run_selftest(std::cout);

  RunOptions opt;
  try {
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (!format.empty()) opt.format = format;
    for (const auto& o : overrides) opt.tol_overrides.push_back(parse_tol_override(o));
  } catch (const ParseError& e) {
    std::cerr << "qhist: " << e.what() << '\n';
    return kExitParse;
  }
  const RunResult r = run_scenario_file(path, opt);
  for (const auto& f : r.files) std::cout << f << '\n';
  if (r.exit_code != kExitOk) std::cerr << "qhist: " << r.message << '\n';
  return r.exit_code;
}
