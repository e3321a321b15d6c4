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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlcache {

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 198;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  // Accepts "p/q" or a plain integer "p"; p, q > 0.
  static Rational parse(std::string_view text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr Rational kDefaultLevelSeparation{1, 198};

// One popularity level of the multi-user setup. users_per_cache is kept real
// so that specs induced from a continuous popularity profile stay exact.
struct LevelSpec {
  std::int64_t files = 1;
  double users_per_cache = 1.0;
  int degree = 1;

  double popularity() const noexcept { return users_per_cache / static_cast<double>(files); }
  friend bool operator==(const LevelSpec&, const LevelSpec&) = default;
};

struct SULevelSpec {
  std::int64_t files = 1;
  std::int64_t users_total = 1;

  double popularity() const noexcept {
    return static_cast<double>(users_total) / static_cast<double>(files);
  }
  friend bool operator==(const SULevelSpec&, const SULevelSpec&) = default;
};

enum class Setup { kMultiUser, kSingleUser };

// Immutable problem instance. Levels are held in canonical order (popularity
// descending, stable on input position); original positions are kept for
// labelling output.
class SystemSpec {
 public:
  static SystemSpec multi_user(int caches, std::vector<LevelSpec> levels,
                               Rational level_separation = kDefaultLevelSeparation);
  static SystemSpec single_user(int caches, std::vector<SULevelSpec> levels,
                                Rational level_separation = kDefaultLevelSeparation);

  Setup setup() const noexcept { return setup_; }
  bool is_multi_user() const noexcept { return setup_ == Setup::kMultiUser; }
  int caches() const noexcept { return caches_; }
  std::size_t level_count() const noexcept { return original_index_.size(); }

  // Throw ModelError(kWrongSetup) when called on the other setup.
  std::span<const LevelSpec> levels() const;
  std::span<const SULevelSpec> su_levels() const;

  const Rational& level_separation() const noexcept { return separation_; }
  double beta() const noexcept { return separation_.value(); }
  int max_degree() const noexcept { return max_degree_; }

  std::int64_t files(std::size_t level) const;
  std::int64_t total_files() const;
  // Sum over levels of N_i / d_i (multi-user) or N_i (single-user).
  double full_storage() const;

  // Position of canonical level `level` in the input (0-based).
  std::size_t original_index(std::size_t level) const { return original_index_.at(level); }
  // 1-based label used in all human-facing output.
  std::size_t label(std::size_t level) const { return original_index(level) + 1; }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;

 private:
  SystemSpec() = default;

  Setup setup_ = Setup::kMultiUser;
  int caches_ = 1;
  std::vector<LevelSpec> mu_;
  std::vector<SULevelSpec> su_;
  std::vector<std::size_t> original_index_;
  Rational separation_ = kDefaultLevelSeparation;
  int max_degree_ = 1;
};

SystemSpec parse_spec(std::string_view json_text);
// Serializes in input order so that parse(serialize(s)) == s.
std::string serialize_spec(const SystemSpec& spec, int indent = 2);

struct ValidationReport {
  bool files_vs_users = true;
  bool separation = true;
  // Adjacent canonical pairs: sqrt(pop_i / pop_{i+1}). Empty for single-user.
  std::vector<double> separation_ratios;
  double required_ratio = 0.0;
  Rational level_separation = kDefaultLevelSeparation;
  std::vector<std::string> warnings;

  bool regular() const noexcept { return files_vs_users && separation; }
};

ValidationReport validate(const SystemSpec& spec);

}  // namespace mlcache
