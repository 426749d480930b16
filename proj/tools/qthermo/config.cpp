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

#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qthermo::cli {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::number: return "number";
    case Kind::integer: return "integer";
    case Kind::boolean: return "boolean";
    case Kind::text: return "string";
    case Kind::number_list: return "number list";
    case Kind::text_list: return "string list";
    case Kind::ramp: return "ramp";
  }
  return "?";
}

namespace {

bool fits(const Param& p, const json& v) {
  auto in_choices = [&](const json& s) {
    if (!s.is_string()) return false;
    if (p.choices.empty()) return true;
    for (const auto& c : p.choices)
      if (c == s.get<std::string>()) return true;
    return false;
  };
  switch (p.kind) {
    case Kind::number: return v.is_number();
    case Kind::integer: return v.is_number_integer() || (v.is_number() && std::nearbyint(v.get<double>()) == v.get<double>());
    case Kind::boolean: return v.is_boolean();
    case Kind::text: return in_choices(v);
    case Kind::number_list:
      if (!v.is_array() || v.empty()) return false;
      for (const auto& x : v)
        if (!x.is_number()) return false;
      return true;
    case Kind::text_list:
      if (!v.is_array() || v.empty()) return false;
      for (const auto& x : v)
        if (!in_choices(x)) return false;
      return true;
    case Kind::ramp: {
      if (!v.is_object()) return false;
      for (const auto& [k, x] : v.items()) {
        if (k == "kind") {
          if (!x.is_string()) return false;
          const auto s = x.get<std::string>();
          if (s != "linear" && s != "smooth" && s != "constant") return false;
        } else if (k == "from" || k == "to" || k == "duration") {
          if (!x.is_number()) return false;
        } else {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

json normalized(const Param& p, const json& v) {
  if (p.kind == Kind::integer) return static_cast<long long>(std::llround(v.get<double>()));
  if (p.kind == Kind::number) return v.get<double>();
  if (p.kind == Kind::number_list) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x.get<double>());
    return out;
  }
  return v;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

json scalar(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) throw SchemaError("config line " + std::to_string(line) + ": missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw SchemaError("config line " + std::to_string(line) + ": unterminated string");
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  long long i = 0;
  auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ei == std::errc() && pi == s.data() + s.size()) return i;
  double d = 0;
  auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ed == std::errc() && pd == s.data() + s.size()) return d;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      throw SchemaError("config line " + std::to_string(line) + ": cannot read value '" + s + "'");
  return s;
}

void assign(json& root, const std::string& dotted, json value, int line) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = trim(dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (part.empty()) throw SchemaError("config line " + std::to_string(line) + ": empty key");
    if (dot == std::string::npos) {
      if (node->contains(part)) throw SchemaError("config line " + std::to_string(line) + ": duplicate key '" + dotted + "'");
      (*node)[part] = std::move(value);
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw SchemaError("config line " + std::to_string(line) + ": '" + part + "' is not a table");
    start = dot + 1;
  }
}

}  // namespace

json Schema::defaults() const {
  json out = json::object();
  for (const auto& p : params_) out[p.name] = p.fallback;
  return out;
}

json Schema::describe() const {
  json out = json::array();
  for (const auto& p : params_) {
    json e{{"name", p.name}, {"type", to_string(p.kind)}, {"default", p.fallback}, {"help", p.help}};
    if (!p.choices.empty()) e["choices"] = p.choices;
    out.push_back(e);
  }
  return out;
}

json Schema::resolve(const json& given) const {
  if (!given.is_object()) throw SchemaError("parameters must form a table");
  json out = json::object();
  for (const auto& p : params_) {
    json v = given.contains(p.name) ? given.at(p.name) : p.fallback;
    if (p.kind == Kind::ramp && v.is_object()) {
      json merged = p.fallback;
      merged.update(v);
      v = std::move(merged);
    }
    if (!fits(p, v)) {
      std::string msg = "parameter '" + p.name + "' must be a " + to_string(p.kind);
      if (!p.choices.empty()) {
        msg += " from {";
        for (std::size_t i = 0; i < p.choices.size(); ++i) msg += (i ? ", " : "") + p.choices[i];
        msg += "}";
      }
      throw SchemaError(msg + ", got " + v.dump());
    }
    out[p.name] = normalized(p, v);
  }
  for (const auto& [k, v] : given.items()) {
    bool known = false;
    for (const auto& p : params_) known = known || p.name == k;
    if (!known) throw SchemaError("unknown parameter '" + k + "'");
  }
  return out;
}

json parse_key_value(const std::string& text) {
  json root = json::object();
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') throw SchemaError("config line " + std::to_string(line) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw SchemaError("config line " + std::to_string(line) + ": empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw SchemaError("config line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq)), rhs = trim(s.substr(eq + 1));
    json value;
    if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']') throw SchemaError("config line " + std::to_string(line) + ": lists must close on the same line");
      value = json::array();
      const std::string body = trim(rhs.substr(1, rhs.size() - 2));
      std::size_t start = 0;
      while (!body.empty() && start <= body.size()) {
        const auto comma = body.find(',', start);
        value.push_back(scalar(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start), line));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else {
      value = scalar(rhs, line);
    }
    assign(root, section.empty() ? key : section + "." + key, std::move(value), line);
  }
  return root;
}

json load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  return parse_key_value(text);
}

Schedule make_ramp(const json& spec) {
  const std::string kind = spec.value("kind", "linear");
  const double from = spec.value("from", 0.0), to = spec.value("to", from), duration = spec.value("duration", 1.0);
  if (!(duration > 0)) throw SchemaError("ramp duration must be positive");
  if (kind == "smooth") return smooth_ramp(from, to, duration);
  if (kind == "constant") return constant_schedule(from, duration);
  return linear_ramp(from, to, duration);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qthermo::cli
