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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace qthermo::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Artifacts {
  Table table;
  json summary = json::object();
  bool sidecar = false;  // also write <experiment>.json
};

struct Experiment {
  std::string name;
  std::string topic;
  Schema schema;
  std::function<Artifacts(const json& params, std::uint64_t seed)> run;
};

const std::vector<Experiment>& registry();
const Experiment& find_experiment(const std::string& name);  // SchemaError when unknown

json registry_json();

std::string render_csv(const Table& t, const std::string& manifest_name);

struct RunRequest {
  std::string experiment;
  json params = json::object();
  std::uint64_t seed = 1;
  std::filesystem::path out = ".";
};

// Splits a loaded config into the reserved keys (experiment, seed, out) and parameters.
RunRequest request_from_config(const json& config);

struct RunResult {
  std::filesystem::path csv;
  std::filesystem::path sidecar;  // empty when not written
  std::filesystem::path manifest;
  json manifest_json;
};

RunResult run_experiment(const RunRequest& req);

// 2 for bad input, 3 for integration failures and singular drives, 4 for caps, 1 otherwise.
int exit_code(const std::exception& e);

}  // namespace qthermo::cli
