// Copyright 2026 The mlcache Authors
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

#include "mlcache/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mlcache/errors.hpp"

namespace mlcache {
namespace {

using nlohmann::json;

template <typename Level>
std::vector<std::size_t> canonical_order(const std::vector<Level>& levels) {
  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Compare U_a/N_a > U_b/N_b by cross-multiplication to keep exact ties exact.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double lhs = static_cast<double>(levels[a].popularity_key()) *
                       static_cast<double>(levels[b].files);
    const double rhs = static_cast<double>(levels[b].popularity_key()) *
                       static_cast<double>(levels[a].files);
    return lhs > rhs;
  });
  return order;
}

struct MuKey {
  const LevelSpec& level;
  std::int64_t files;
  double popularity_key() const { return level.users_per_cache; }
};
struct SuKey {
  const SULevelSpec& level;
  std::int64_t files;
  double popularity_key() const { return static_cast<double>(level.users_total); }
};

std::int64_t parse_count(const json& node, const std::string& field) {
  if (node.is_number_integer()) {
    const auto v = node.get<std::int64_t>();
    if (v < 1) throw ParseError(ParseErrorKind::kNonPositive, field, "must be a positive integer");
    return v;
  }
  if (node.is_number_float()) {
    const double v = node.get<double>();
    if (v == std::floor(v) && v >= 1.0 && v < 9.0e18) return static_cast<std::int64_t>(v);
    if (v <= 0.0) throw ParseError(ParseErrorKind::kNonPositive, field, "must be a positive integer");
  }
  throw ParseError(ParseErrorKind::kInvalidValue, field, "expected a positive integer");
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(ParseErrorKind::kMissingField, path + key, "required field is missing");
  }
  return *it;
}

}  // namespace

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc() || ptr != end || part.empty()) {
      throw ParseError(ParseErrorKind::kInvalidValue, "beta",
                       "expected a rational such as \"1/198\", got \"" + std::string(text) + "\"");
    }
    return v;
  };
  Rational r;
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    r.num = parse_int(text);
    r.den = 1;
  } else {
    r.num = parse_int(text.substr(0, slash));
    r.den = parse_int(text.substr(slash + 1));
  }
  if (r.num <= 0 || r.den <= 0) {
    throw ParseError(ParseErrorKind::kNonPositive, "beta", "numerator and denominator must be positive");
  }
  const auto g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

SystemSpec SystemSpec::multi_user(int caches, std::vector<LevelSpec> levels, Rational sep) {
  if (caches < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "caches must be >= 1");
  if (levels.empty()) throw ModelError(ModelErrorKind::kInvalidParameters, "at least one level is required");
  if (sep.num <= 0 || sep.den <= 0) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "level separation must be positive");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const std::string where = "level " + std::to_string(i + 1) + ": ";
    if (l.files < 1) throw ModelError(ModelErrorKind::kInvalidParameters, where + "files must be >= 1");
    if (!(l.users_per_cache > 0.0) || !std::isfinite(l.users_per_cache)) {
      throw ModelError(ModelErrorKind::kInvalidParameters, where + "users_per_cache must be positive");
    }
    if (l.degree < 1) throw ModelError(ModelErrorKind::kInvalidParameters, where + "degree must be >= 1");
    if (l.degree > caches) {
      throw ModelError(ModelErrorKind::kInvalidParameters, where + "degree exceeds cache count");
    }
  }
  std::vector<MuKey> keys;
  keys.reserve(levels.size());
  for (const auto& l : levels) keys.push_back({l, l.files});

  SystemSpec spec;
  spec.setup_ = Setup::kMultiUser;
  spec.caches_ = caches;
  spec.separation_ = sep;
  spec.original_index_ = canonical_order(keys);
  spec.mu_.reserve(levels.size());
  for (auto idx : spec.original_index_) spec.mu_.push_back(levels[idx]);
  spec.max_degree_ = 1;
  for (const auto& l : spec.mu_) spec.max_degree_ = std::max(spec.max_degree_, l.degree);
  return spec;
}

SystemSpec SystemSpec::single_user(int caches, std::vector<SULevelSpec> levels, Rational sep) {
  if (caches < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "caches must be >= 1");
  if (levels.empty()) throw ModelError(ModelErrorKind::kInvalidParameters, "at least one level is required");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string where = "level " + std::to_string(i + 1) + ": ";
    if (levels[i].files < 1) throw ModelError(ModelErrorKind::kInvalidParameters, where + "files must be >= 1");
    if (levels[i].users_total < 1) {
      throw ModelError(ModelErrorKind::kInvalidParameters, where + "users must be >= 1");
    }
    total += levels[i].users_total;
  }
  if (total != caches) {
    throw ModelError(ModelErrorKind::kInvalidParameters,
                     "single-user level users sum to " + std::to_string(total) + ", expected " +
                         std::to_string(caches));
  }
  std::vector<SuKey> keys;
  for (const auto& l : levels) keys.push_back({l, l.files});

  SystemSpec spec;
  spec.setup_ = Setup::kSingleUser;
  spec.caches_ = caches;
  spec.separation_ = sep;
  spec.original_index_ = canonical_order(keys);
  for (auto idx : spec.original_index_) spec.su_.push_back(levels[idx]);
  spec.max_degree_ = 1;
  return spec;
}

std::span<const LevelSpec> SystemSpec::levels() const {
  if (setup_ != Setup::kMultiUser) {
    throw ModelError(ModelErrorKind::kWrongSetup, "operation requires a multi-user spec");
  }
  return mu_;
}

std::span<const SULevelSpec> SystemSpec::su_levels() const {
  if (setup_ != Setup::kSingleUser) {
    throw ModelError(ModelErrorKind::kWrongSetup, "operation requires a single-user spec");
  }
  return su_;
}

std::int64_t SystemSpec::files(std::size_t level) const {
  return setup_ == Setup::kMultiUser ? mu_.at(level).files : su_.at(level).files;
}

std::int64_t SystemSpec::total_files() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < level_count(); ++i) n += files(i);
  return n;
}

double SystemSpec::full_storage() const {
  double total = 0.0;
  if (setup_ == Setup::kMultiUser) {
    for (const auto& l : mu_) total += static_cast<double>(l.files) / l.degree;
  } else {
    for (const auto& l : su_) total += static_cast<double>(l.files);
  }
  return total;
}

SystemSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(ParseErrorKind::kMalformedJson, "", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(ParseErrorKind::kMalformedJson, "", "top level must be an object");

  const auto& setup_node = require(doc, "setup", "");
  if (!setup_node.is_string()) {
    throw ParseError(ParseErrorKind::kInvalidValue, "setup", "expected \"multi-user\" or \"single-user\"");
  }
  const auto setup = setup_node.get<std::string>();
  if (setup != "multi-user" && setup != "single-user") {
    throw ParseError(ParseErrorKind::kInvalidValue, "setup", "expected \"multi-user\" or \"single-user\"");
  }
  const auto caches64 = parse_count(require(doc, "caches", ""), "caches");
  if (caches64 > 1'000'000) throw ParseError(ParseErrorKind::kInvalidValue, "caches", "too large");
  const int caches = static_cast<int>(caches64);

  Rational beta = kDefaultLevelSeparation;
  if (auto it = doc.find("beta"); it != doc.end()) {
    if (it->is_string()) {
      beta = Rational::parse(it->get<std::string>());
    } else if (it->is_number_integer()) {
      beta = Rational::parse(std::to_string(it->get<std::int64_t>()));
    } else {
      throw ParseError(ParseErrorKind::kInvalidValue, "beta", "expected a rational string such as \"1/198\"");
    }
  }

  const auto& levels_node = require(doc, "levels", "");
  if (!levels_node.is_array() || levels_node.empty()) {
    throw ParseError(ParseErrorKind::kInvalidValue, "levels", "expected a nonempty array");
  }

  if (setup == "multi-user") {
    std::vector<LevelSpec> levels;
    for (std::size_t i = 0; i < levels_node.size(); ++i) {
      const auto& node = levels_node[i];
      const std::string path = "levels[" + std::to_string(i) + "].";
      if (!node.is_object()) throw ParseError(ParseErrorKind::kInvalidValue, path, "expected an object");
      LevelSpec l;
      l.files = parse_count(require(node, "files", path), path + "files");
      const auto& u = require(node, "users_per_cache", path);
      if (!u.is_number()) {
        throw ParseError(ParseErrorKind::kInvalidValue, path + "users_per_cache", "expected a number");
      }
      l.users_per_cache = u.get<double>();
      if (!(l.users_per_cache > 0.0) || !std::isfinite(l.users_per_cache)) {
        throw ParseError(ParseErrorKind::kNonPositive, path + "users_per_cache", "must be positive");
      }
      const auto degree = parse_count(require(node, "degree", path), path + "degree");
      if (degree > caches) {
        throw ParseError(ParseErrorKind::kDegreeExceedsCaches, path + "degree",
                         "degree " + std::to_string(degree) + " exceeds caches " + std::to_string(caches));
      }
      l.degree = static_cast<int>(degree);
      levels.push_back(l);
    }
    return SystemSpec::multi_user(caches, std::move(levels), beta);
  }

  std::vector<SULevelSpec> levels;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < levels_node.size(); ++i) {
    const auto& node = levels_node[i];
    const std::string path = "levels[" + std::to_string(i) + "].";
    if (!node.is_object()) throw ParseError(ParseErrorKind::kInvalidValue, path, "expected an object");
    SULevelSpec l;
    l.files = parse_count(require(node, "files", path), path + "files");
    l.users_total = parse_count(require(node, "users", path), path + "users");
    total += l.users_total;
    levels.push_back(l);
  }
  if (total != caches) {
    throw ParseError(ParseErrorKind::kUserCountMismatch, "levels[].users",
                     "users sum to " + std::to_string(total) + " but caches is " + std::to_string(caches));
  }
  return SystemSpec::single_user(caches, std::move(levels), beta);
}

std::string serialize_spec(const SystemSpec& spec, int indent) {
  json doc;
  doc["setup"] = spec.is_multi_user() ? "multi-user" : "single-user";
  doc["caches"] = spec.caches();
  doc["beta"] = spec.level_separation().str();
  std::vector<json> levels(spec.level_count());
  for (std::size_t i = 0; i < spec.level_count(); ++i) {
    json node;
    if (spec.is_multi_user()) {
      const auto& l = spec.levels()[i];
      node["files"] = l.files;
      if (l.users_per_cache == std::floor(l.users_per_cache) && l.users_per_cache < 9.0e15) {
        node["users_per_cache"] = static_cast<std::int64_t>(l.users_per_cache);
      } else {
        node["users_per_cache"] = l.users_per_cache;
      }
      node["degree"] = l.degree;
    } else {
      const auto& l = spec.su_levels()[i];
      node["files"] = l.files;
      node["users"] = l.users_total;
    }
    levels[spec.original_index(i)] = std::move(node);
  }
  doc["levels"] = levels;
  return doc.dump(indent);
}

ValidationReport validate(const SystemSpec& spec) {
  ValidationReport report;
  report.level_separation = spec.level_separation();
  report.required_ratio = spec.max_degree() / spec.beta();
  const auto K = static_cast<double>(spec.caches());

  if (spec.is_multi_user()) {
    const auto levels = spec.levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double need = K * levels[i].users_per_cache;
      if (static_cast<double>(levels[i].files) < need) {
        report.files_vs_users = false;
        report.warnings.push_back("level " + std::to_string(spec.label(i)) + ": files " +
                                  std::to_string(levels[i].files) + " < K*U = " + std::to_string(need) +
                                  "; worst-case demands repeat files");
      }
    }
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const double ratio = std::sqrt(levels[i].popularity() / levels[i + 1].popularity());
      report.separation_ratios.push_back(ratio);
      if (ratio < report.required_ratio) {
        report.separation = false;
        report.warnings.push_back("levels " + std::to_string(spec.label(i)) + "," +
                                  std::to_string(spec.label(i + 1)) + ": separation ratio " +
                                  std::to_string(ratio) + " < D/beta = " +
                                  std::to_string(report.required_ratio) +
                                  "; constant-gap guarantees do not apply");
      }
    }
  } else {
    const auto levels = spec.su_levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].files < levels[i].users_total) {
        report.files_vs_users = false;
        report.warnings.push_back("level " + std::to_string(spec.label(i)) + ": files " +
                                  std::to_string(levels[i].files) + " < users " +
                                  std::to_string(levels[i].users_total) +
                                  "; the gap-72 guarantee does not apply");
      }
    }
  }
  return report;
}

}  // namespace mlcache
