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
#include <string>
#include <vector>

#include <json.hpp>

#include "qthermo/core/errors.hpp"
#include "qthermo/core/schedule.hpp"

namespace qthermo::cli {

using json = nlohmann::ordered_json;

// Bad configuration: unknown key, wrong type, malformed file. Maps to exit code 2.
class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Kind { number, integer, boolean, text, number_list, text_list, ramp };

std::string to_string(Kind k);

struct Param {
  std::string name;
  Kind kind;
  json fallback;
  std::string help;
  std::vector<std::string> choices{};  // for text and text_list
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Param> params) : params_(std::move(params)) {}

  const std::vector<Param>& params() const noexcept { return params_; }
  json defaults() const;
  json describe() const;
  // Defaults overlaid with the given object; unknown keys and type mismatches throw SchemaError.
  json resolve(const json& given) const;

 private:
  std::vector<Param> params_;
};

// Parses "key = value" text. [section] headers and dotted keys nest; values are numbers,
// true/false, quoted or bare strings, or one-line [a, b, c] lists.
json parse_key_value(const std::string& text);

// JSON when the file starts with '{', key = value otherwise.
json load_config(const std::string& path);

// {kind = linear | smooth | constant, from, to, duration}
Schedule make_ramp(const json& spec);

std::string format_number(double x);
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t h);

}  // namespace qthermo::cli
