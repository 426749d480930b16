// Copyright 2026 The qthermo Authors
//
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

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"

namespace {

using namespace qthermo::cli;

int run_command(const std::string& name, const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::string& out) {
  RunRequest req;
  if (!config_path.empty()) req = request_from_config(load_config(config_path));
  if (!req.experiment.empty() && req.experiment != name)
    throw SchemaError("config names experiment '" + req.experiment + "' but '" + name + "' was requested");
  req.experiment = name;
  if (seed) req.seed = *seed;
  if (!out.empty()) req.out = out;
  const auto res = run_experiment(req);
  std::cout << res.csv.string() << '\n';
  if (!res.sidecar.empty()) std::cout << res.sidecar.string() << '\n';
  std::cout << res.manifest.string() << '\n';
  return 0;
}

int list_command(bool as_json) {
  if (as_json) {
    std::cout << registry_json().dump(2) << '\n';
    return 0;
  }
  for (const auto& e : registry()) {
    std::cout << e.name << "  [" << e.topic << "]\n";
    for (const auto& p : e.schema.params())
      std::cout << "    " << p.name << " (" << to_string(p.kind) << ", default " << p.fallback.dump() << ")  " << p.help
                << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qthermo: quantum thermodynamics experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment and write CSV, JSON and manifest artifacts");
  std::string name, config, out;
  std::optional<std::uint64_t> seed;
  run->add_option("experiment", name, "experiment name")->required();
  run->add_option("--config", config, "key = value or JSON config file");
  run->add_option("--seed", seed, "random seed (overrides the config)");
  run->add_option("--out", out, "output directory (overrides the config)");

  auto* list = app.add_subcommand("list", "list experiments with their parameter schemas");
  bool as_json = false;
  list->add_flag("--json", as_json, "print the registry as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) return list_command(as_json);
    return run_command(name, config, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "qthermo: " << e.what() << '\n';
    return exit_code(e);
  }
}
