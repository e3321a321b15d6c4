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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "mlcache/bounds.hpp"
#include "mlcache/discretize.hpp"
#include "mlcache/errors.hpp"
#include "mlcache/io.hpp"
#include "mlcache/model.hpp"
#include "mlcache/partition.hpp"
#include "mlcache/rates.hpp"
#include "mlcache/sim.hpp"

namespace mlcache::cli {
namespace {

using Json = nlohmann::ordered_json;

enum class Format { kAuto, kCsv, kJson };

struct Globals {
  Format format = Format::kAuto;
  std::string out_path;
  bool quiet = false;
};

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Context {
 public:
  Context(const Globals& g, std::ostream& err) : globals_(g), err_(err) {}

  bool json(Format fallback) const {
    return (globals_.format == Format::kAuto ? fallback : globals_.format) == Format::kJson;
  }
  std::ostream& out() { return buffer_; }
  void note(const std::string& line) {
    if (!globals_.quiet) err_ << line << '\n';
  }
  std::string text() const { return buffer_.str(); }

 private:
  const Globals& globals_;
  std::ostream& err_;
  std::ostringstream buffer_;
};

std::string num(double v) { return format_number(v); }

// JSON cannot carry infinities; they are written as strings.
Json jnum(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json spec_json(const SystemSpec& spec) { return Json::parse(serialize_spec(spec, -1)); }

SystemSpec load_spec(const std::string& path) { return parse_spec(read_text_file(path)); }

Json level_set_json(const SystemSpec& spec, const LevelSet& set) {
  Json a = Json::array();
  std::vector<std::size_t> labels;
  for (auto i : set) labels.push_back(spec.label(i));
  std::sort(labels.begin(), labels.end());
  for (auto l : labels) a.push_back(l);
  return a;
}

// ---------------------------------------------------------------- validate

void cmd_validate(Context& ctx, const std::string& spec_path, bool strict) {
  const auto spec = load_spec(spec_path);
  const auto report = validate(spec);
  if (ctx.json(Format::kCsv)) {
    Json j;
    j["regular"] = report.regular();
    j["files_vs_users"] = report.files_vs_users;
    j["separation"] = report.separation;
    j["level_separation"] = report.level_separation.str();
    j["required_ratio"] = report.required_ratio;
    j["separation_ratios"] = Json::array();
    for (double r : report.separation_ratios) j["separation_ratios"].push_back(jnum(r));
    j["warnings"] = report.warnings;
    ctx.out() << j.dump(2) << '\n';
  } else {
    auto& o = ctx.out();
    o << "check,value,satisfied\n";
    o << "files_vs_users,," << (report.files_vs_users ? "true" : "false") << '\n';
    o << "separation," << num(report.required_ratio) << ',' << (report.separation ? "true" : "false") << '\n';
    for (std::size_t k = 0; k < report.separation_ratios.size(); ++k) {
      const double r = report.separation_ratios[k];
      o << "ratio_" << spec.label(k) << '_' << spec.label(k + 1) << ',' << num(r) << ','
        << (r >= report.required_ratio ? "true" : "false") << '\n';
    }
  }
  for (const auto& w : report.warnings) ctx.note("warning: " + w);
  if (strict && !report.regular()) {
    throw ModelError(ModelErrorKind::kOutOfModel, "spec violates the regularity conditions");
  }
}

// ---------------------------------------------------------------- table

void cmd_table(Context& ctx, const std::string& spec_path) {
  const auto spec = load_spec(spec_path);
  const auto table = interval_table(spec);
  if (ctx.json(Format::kCsv)) {
    Json rows = Json::array();
    for (const auto& r : table.rows()) {
      Json row;
      row["t"] = r.t;
      row["x_t"] = r.threshold.value;
      row["kind"] = r.threshold.kind == ThresholdKind::kLower ? "m" : "M";
      row["level"] = spec.label(r.threshold.level);
      row["Y_t"] = r.lower;
      row["H"] = level_set_json(spec, r.partition.H);
      row["I"] = level_set_json(spec, r.partition.I);
      row["J"] = level_set_json(spec, r.partition.J);
      rows.push_back(std::move(row));
    }
    Json j;
    j["full_storage"] = table.full_storage();
    j["rows"] = std::move(rows);
    ctx.out() << j.dump(2) << '\n';
    return;
  }
  auto& o = ctx.out();
  o << "t,x_t,kind,level,Y_t,H,I,J\n";
  for (const auto& r : table.rows()) {
    o << r.t << ',' << num(r.threshold.value) << ',' << (r.threshold.kind == ThresholdKind::kLower ? 'm' : 'M')
      << ',' << spec.label(r.threshold.level) << ',' << num(r.lower) << ','
      << format_level_set(spec, r.partition.H) << ',' << format_level_set(spec, r.partition.I) << ','
      << format_level_set(spec, r.partition.J) << '\n';
  }
}

// ---------------------------------------------------------------- rate

void cmd_rate(Context& ctx, const std::string& spec_path, double memory) {
  const auto spec = load_spec(spec_path);
  const bool json = ctx.json(Format::kCsv);
  auto& o = ctx.out();
  if (spec.is_multi_user()) {
    const auto r = multiuser_rate(spec, memory);
    const auto& a = *r.allocation;
    const auto levels = spec.levels();
    if (json) {
      Json j;
      j["memory"] = memory;
      j["rate"] = r.total;
      j["approx"] = jnum(*r.approx);
      j["effective_memory"] = std::isnan(a.effective_memory) ? Json(nullptr) : Json(a.effective_memory);
      Json per = Json::array();
      for (std::size_t i = 0; i < levels.size(); ++i) {
        Json l;
        l["level"] = spec.label(i);
        l["files"] = levels[i].files;
        l["users_per_cache"] = levels[i].users_per_cache;
        l["degree"] = levels[i].degree;
        l["alloc"] = a.per_level[i];
        l["alpha"] = memory > 0.0 ? a.per_level[i] / memory : 0.0;
        l["rate"] = r.per_level[i];
        l["upper_bound"] = jnum(r.upper_bounds[i]);
        per.push_back(std::move(l));
      }
      j["levels"] = std::move(per);
      j["partition"] = {{"H", level_set_json(spec, a.partition.H)},
                        {"I", level_set_json(spec, a.partition.I)},
                        {"J", level_set_json(spec, a.partition.J)}};
      j["refined"] = {{"I0", level_set_json(spec, a.refined.I0)},
                      {"I_prime", level_set_json(spec, a.refined.Iprime)},
                      {"I1", level_set_json(spec, a.refined.I1)}};
      j["warnings"] = a.refined.warnings;
      o << j.dump(2) << '\n';
    } else {
      o << "level,files,users_per_cache,degree,alloc,rate\n";
      for (std::size_t i = 0; i < levels.size(); ++i) {
        o << spec.label(i) << ',' << levels[i].files << ',' << num(levels[i].users_per_cache) << ','
          << levels[i].degree << ',' << num(a.per_level[i]) << ',' << num(r.per_level[i]) << '\n';
      }
      o << "total,,,," << num(memory) << ',' << num(r.total) << '\n';
    }
    for (const auto& w : a.refined.warnings) ctx.note("warning: " + w);
    return;
  }
  const auto r = singleuser_rate(spec, memory);
  const auto levels = spec.su_levels();
  const auto& p = *r.su_partition;
  if (json) {
    Json j;
    j["memory"] = memory;
    j["rate"] = r.total;
    j["refined_upper_bound"] = jnum(*r.refined_upper_bound);
    j["regrouped_rate"] = jnum(*r.regrouped_rate);
    j["prior_knowledge_rate"] = *r.prior_knowledge_rate;
    Json per = Json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      per.push_back({{"level", spec.label(i)},
                     {"files", levels[i].files},
                     {"users", levels[i].users_total},
                     {"rate", r.per_level[i]}});
    }
    j["levels"] = std::move(per);
    j["partition"] = {{"H_prime", level_set_json(spec, p.Hprime)}, {"I_prime", level_set_json(spec, p.Iprime)},
                      {"G", level_set_json(spec, p.G)},           {"H", level_set_json(spec, p.H)},
                      {"I", level_set_json(spec, p.I)},           {"J", level_set_json(spec, p.J)}};
    o << j.dump(2) << '\n';
  } else {
    o << "level,files,users,rate\n";
    for (std::size_t i = 0; i < levels.size(); ++i) {
      o << spec.label(i) << ',' << levels[i].files << ',' << levels[i].users_total << ',' << num(r.per_level[i])
        << '\n';
    }
    o << "total,,," << num(r.total) << '\n';
  }
}

// ---------------------------------------------------------------- curve

void cmd_curve(Context& ctx, const std::string& spec_path, const std::string& grid_text) {
  const auto spec = load_spec(spec_path);
  const auto grid = parse_grid(grid_text);
  const auto rows = rate_curve(spec, grid);
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  auto jcell = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  if (ctx.json(Format::kCsv)) {
    Json a = Json::array();
    for (const auto& r : rows) {
      a.push_back({{"M", r.memory},
                   {"R_ms", jcell(r.memory_sharing)},
                   {"R_lfu", jcell(r.lfu)},
                   {"R_coded_lfu", jcell(r.coded_lfu)},
                   {"R_uniform", jcell(r.uniform)},
                   {"R_su", jcell(r.single_user)},
                   {"R_prior", jcell(r.prior)}});
    }
    ctx.out() << a.dump(2) << '\n';
    return;
  }
  auto& o = ctx.out();
  o << "M,R_ms,R_lfu,R_coded_lfu,R_uniform,R_su,R_prior\n";
  for (const auto& r : rows) {
    o << num(r.memory) << ',' << cell(r.memory_sharing) << ',' << cell(r.lfu) << ',' << cell(r.coded_lfu) << ','
      << cell(r.uniform) << ',' << cell(r.single_user) << ',' << cell(r.prior) << '\n';
  }
}

// ---------------------------------------------------------------- bound

std::string join(const auto& values) {
  std::string s;
  for (const auto& v : values) {
    if (!s.empty()) s += '-';
    s += std::to_string(v);
  }
  return s;
}

// Window-bound parameters are stored per canonical level; render them in input order.
template <typename T>
std::vector<T> input_order(const SystemSpec& spec, const std::vector<T>& canonical) {
  std::vector<T> out(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) out[spec.original_index(i)] = canonical[i];
  return out;
}

std::string params_text(const SystemSpec& spec, const LowerBound& lb) {
  if (const auto* p = std::get_if<BoundParams>(&lb.params)) {
    return "t=" + std::to_string(p->t) + ";b=" + std::to_string(p->b) + ";s=" + join(input_order(spec, p->s));
  }
  if (const auto* p = std::get_if<CutSetParams>(&lb.params)) {
    return "caches=" + std::to_string(p->caches) + ";b=" + std::to_string(p->b);
  }
  if (const auto* p = std::get_if<SUBoundParams>(&lb.params)) {
    return "b=" + std::to_string(p->b) + ";s=" + join(input_order(spec, p->s)) + ";s_J=" + std::to_string(p->s_J);
  }
  return "";
}

Json params_json(const SystemSpec& spec, const LowerBound& lb) {
  if (const auto* p = std::get_if<BoundParams>(&lb.params)) {
    return {{"t", p->t}, {"b", p->b}, {"s", input_order(spec, p->s)}, {"lambda", input_order(spec, p->lambda)}};
  }
  if (const auto* p = std::get_if<CutSetParams>(&lb.params)) return {{"caches", p->caches}, {"b", p->b}};
  if (const auto* p = std::get_if<SUBoundParams>(&lb.params)) {
    std::vector<int> in_j;
    for (bool x : p->in_J) in_j.push_back(x ? 1 : 0);
    return {{"b", p->b}, {"s", input_order(spec, p->s)}, {"in_J", input_order(spec, in_j)},
            {"s_J", p->s_J}, {"n_J", p->n_J}};
  }
  return nullptr;
}

void cmd_bound(Context& ctx, const std::string& spec_path, const std::vector<double>& grid) {
  const auto spec = load_spec(spec_path);
  const bool json = ctx.json(Format::kCsv);
  Json a = Json::array();
  if (!json) ctx.out() << "M,R_lb,origin,params\n";
  for (double m : grid) {
    const auto lb = best_lower_bound(spec, m);
    if (json) {
      a.push_back({{"M", m}, {"R_lb", lb.value}, {"origin", to_string(lb.origin)}, {"params", params_json(spec, lb)}});
    } else {
      ctx.out() << num(m) << ',' << num(lb.value) << ',' << to_string(lb.origin) << ',' << params_text(spec, lb)
                << '\n';
    }
  }
  if (json) ctx.out() << a.dump(2) << '\n';
}

// ---------------------------------------------------------------- gap

void cmd_gap(Context& ctx, const std::string& spec_path, const std::string& grid_text) {
  const auto spec = load_spec(spec_path);
  const auto grid = parse_grid(grid_text);
  const auto rows = gap(spec, grid);
  const GapRow* worst = nullptr;
  for (const auto& r : rows) {
    if (!worst || r.ratio > worst->ratio) worst = &r;
  }
  if (ctx.json(Format::kCsv)) {
    Json a = Json::array();
    for (const auto& r : rows) {
      a.push_back({{"M", r.memory},
                   {"R_ach", r.achievable},
                   {"R_lb", r.lower},
                   {"ratio", jnum(r.ratio)},
                   {"lb_origin", to_string(r.origin)}});
    }
    ctx.out() << a.dump(2) << '\n';
  } else {
    auto& o = ctx.out();
    o << "M,R_ach,R_lb,ratio,lb_origin\n";
    for (const auto& r : rows) {
      o << num(r.memory) << ',' << num(r.achievable) << ',' << num(r.lower) << ',' << num(r.ratio) << ','
        << to_string(r.origin) << '\n';
    }
  }
  if (worst) ctx.note("max ratio " + num(worst->ratio) + " at M=" + num(worst->memory));
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string spec_path;
  double memory = 0.0;
  std::int64_t file_bits = 1 << 12;
  std::uint64_t seed = 1;
  int trials = 1;
  bool stochastic = false;
  std::string popularity;
  std::int64_t users = 0;
  int caches = 0;
  std::optional<std::int64_t> cut;
  std::size_t lattice = 200;
};

int cmd_simulate(Context& ctx, const SimulateArgs& args) {
  SimReport report;
  if (args.stochastic) {
    if (args.popularity.empty() || args.users <= 0) {
      throw UsageError("--stochastic needs --popularity and --users");
    }
    int caches = args.caches;
    if (!args.spec_path.empty()) {
      const auto spec = load_spec(args.spec_path);
      if (caches != 0 && caches != spec.caches()) throw UsageError("--caches disagrees with --spec");
      caches = spec.caches();
    }
    if (caches <= 0) throw UsageError("--stochastic needs --caches or --spec");
    const auto weights = read_popularity_csv_file(args.popularity);
    StochasticOptions opt;
    opt.cut = args.cut;
    opt.lattice = args.lattice;
    report = simulate_stochastic(weights, caches, args.users, args.memory, args.file_bits, args.seed, args.trials, opt);
  } else {
    if (args.spec_path.empty()) throw UsageError("--spec is required");
    report = simulate(load_spec(args.spec_path), args.memory, args.file_bits, args.seed, args.trials);
  }
  if (ctx.json(Format::kJson)) {
    Json j;
    j["analytic_rate"] = report.analytic_rate;
    j["empirical_mean"] = report.empirical_mean;
    j["empirical_max"] = report.empirical_max;
    j["decode_failures"] = report.decode_failures;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["per_trial"] = report.per_trial;
    ctx.out() << j.dump(2) << '\n';
  } else {
    ctx.out() << "analytic_rate,empirical_mean,empirical_max,decode_failures,trials,seed\n"
              << num(report.analytic_rate) << ',' << num(report.empirical_mean) << ','
              << num(report.empirical_max) << ',' << report.decode_failures << ',' << report.trials << ','
              << report.seed << '\n';
  }
  if (report.decode_failures > 0) {
    ctx.note("error: " + std::to_string(report.decode_failures) + " users failed to decode");
    return kExitDecode;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- discretize

struct DiscretizeArgs {
  std::string popularity;
  std::size_t levels = 2;
  int caches = 1;
  double memory_frac = 0.0;
  std::int64_t users = 1;
  std::size_t lattice = 200;
  bool allow_empty = false;
  std::string spec_out;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write file: " + path);
  f << text;
  if (!f) throw IoError("cannot write file: " + path);
}

void cmd_discretize(Context& ctx, const DiscretizeArgs& args) {
  const auto weights = read_popularity_csv_file(args.popularity);
  const double memory = args.memory_frac * static_cast<double>(weights.size());
  const auto split =
      split_levels(weights, args.levels, args.caches, memory, args.users, args.allow_empty, args.lattice);
  std::vector<std::int64_t> first{0};
  first.insert(first.end(), split.cuts.begin(), split.cuts.end());
  auto level_of = [&](std::size_t k) {
    return split.segment_level[k] == LevelSplit::kDropped ? Json(nullptr)
                                                          : Json(split.spec.label(split.segment_level[k]));
  };
  if (ctx.json(Format::kJson)) {
    Json j;
    j["memory"] = memory;
    j["boundaries"] = split.cuts;
    Json segs = Json::array();
    for (std::size_t k = 0; k < split.segment_files.size(); ++k) {
      segs.push_back({{"first_file", first[k]},
                      {"files", split.segment_files[k]},
                      {"mass", split.segment_mass[k]},
                      {"users", split.segment_users[k]},
                      {"level", level_of(k)}});
    }
    j["segments"] = std::move(segs);
    j["objective"] = split.objective;
    j["spec"] = spec_json(split.spec);
    ctx.out() << j.dump(2) << '\n';
  } else {
    auto& o = ctx.out();
    o << "segment,first_file,files,mass,users,level,objective\n";
    for (std::size_t k = 0; k < split.segment_files.size(); ++k) {
      const auto lvl = level_of(k);
      o << (k + 1) << ',' << first[k] << ',' << split.segment_files[k] << ',' << num(split.segment_mass[k]) << ','
        << split.segment_users[k] << ',' << (lvl.is_null() ? std::string() : std::to_string(lvl.get<std::size_t>()))
        << ',' << num(split.objective) << '\n';
    }
  }
  if (!args.spec_out.empty()) write_file(args.spec_out, serialize_spec(split.spec) + "\n");
}

// ---------------------------------------------------------------- access-opt

void cmd_access(Context& ctx, const std::string& spec_path, double memory, int d_max, double d_avg) {
  const auto spec = load_spec(spec_path);
  if (!spec.is_multi_user()) throw ModelError(ModelErrorKind::kWrongSetup, "access-opt needs a multi-user spec");
  const auto plan = optimize_access(spec, memory, d_max, d_avg);
  const auto degrees = input_order(spec, plan.degrees);
  if (ctx.json(Format::kJson)) {
    Json j;
    j["memory"] = memory;
    j["degrees"] = degrees;
    j["rate"] = plan.rate;
    j["spec"] = spec_json(plan.spec);
    ctx.out() << j.dump(2) << '\n';
    return;
  }
  auto& o = ctx.out();
  o << "level,files,users_per_cache,degree,rate\n";
  const auto levels = spec.levels();
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    std::size_t canon = 0;
    while (spec.original_index(canon) != k) ++canon;
    o << (k + 1) << ',' << levels[canon].files << ',' << num(levels[canon].users_per_cache) << ',' << degrees[k]
      << ',' << num(plan.rate) << '\n';
  }
}

// ---------------------------------------------------------------- small-example

void cmd_small_example(Context& ctx, std::int64_t n2, double memory, std::int64_t file_bits) {
  const double rate = small_example_optimum(memory, n2);
  std::optional<SmallExampleCheck> check;
  for (auto c : {Corner::kM0, Corner::kMhalf, Corner::kM1, Corner::kM2, Corner::kMfull}) {
    if (corner_memory(c, n2) == memory) check = verify_small_example(c, n2, file_bits);
  }
  if (ctx.json(Format::kJson)) {
    Json j;
    j["n2"] = n2;
    j["memory"] = memory;
    j["optimal_rate"] = rate;
    if (check) {
      j["corner"] = to_string(check->corner);
      j["file_bits"] = file_bits;
      j["cache_bits"] = check->cache_bits;
      j["broadcast_bits"] = check->max_broadcast_bits;
      j["demands"] = check->demands;
      j["decoded"] = check->decoded;
      j["verified"] = check->decoded == check->demands &&
                      check->min_broadcast_bits == check->max_broadcast_bits &&
                      check->max_broadcast_bits == static_cast<std::int64_t>(std::llround(rate * file_bits));
    } else {
      j["corner"] = nullptr;
    }
    ctx.out() << j.dump(2) << '\n';
  } else {
    ctx.out() << "M,R_opt,corner,cache_bits,broadcast_bits,decoded,demands\n" << num(memory) << ',' << num(rate);
    if (check) {
      ctx.out() << ',' << to_string(check->corner) << ',' << check->cache_bits << ',' << check->max_broadcast_bits
                << ',' << check->decoded << ',' << check->demands << '\n';
    } else {
      ctx.out() << ",,,,\n";
    }
  }
  if (check && check->decoded != check->demands) {
    throw DecodeError(-1, -1, "corner scheme failed to decode " +
                                  std::to_string(check->demands - check->decoded) + " demands");
  }
}

std::string normalized(const std::string& path) {
  std::error_code ec;
  auto p = std::filesystem::weakly_canonical(path, ec);
  return ec ? path : p.string();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-memory analysis for multi-level coded caching", "mlcache"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  std::string format = "auto";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", globals.out_path, "Write results to this file instead of standard output");
  app.add_flag("--quiet", globals.quiet, "Suppress diagnostics on standard error");

  std::string spec_path, grid;
  double memory = 0.0;
  bool strict = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check the regularity conditions of a spec");
  validate_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  validate_cmd->add_flag("--strict", strict, "Exit with status 3 when a condition fails");

  auto* table_cmd = app.add_subcommand("table", "Print the partition interval table");
  table_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();

  auto* rate_cmd = app.add_subcommand("rate", "Achievable rate at one memory value");
  rate_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  rate_cmd->add_option("--memory", memory, "Cache memory in files")->required()->check(CLI::NonNegativeNumber);

  auto* curve_cmd = app.add_subcommand("curve", "Rates of all schemes over a memory grid");
  curve_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  curve_cmd->add_option("--m-grid", grid, "start:stop:step")->required();

  auto* bound_cmd = app.add_subcommand("bound", "Best lower bound over a memory grid");
  bound_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  auto* bound_grid = bound_cmd->add_option("--m-grid", grid, "start:stop:step");
  auto* bound_mem = bound_cmd->add_option("--memory", memory, "Single memory value");
  bound_grid->excludes(bound_mem);

  auto* gap_cmd = app.add_subcommand("gap", "Achievable rate over lower bound on a memory grid");
  gap_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  gap_cmd->add_option("--m-grid", grid, "start:stop:step")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Bit-level placement and delivery");
  sim_cmd->add_option("--spec", sim.spec_path, "Spec JSON file")->check(CLI::ExistingFile);
  sim_cmd->add_option("--memory", sim.memory, "Cache memory in files")->required()->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--file-bits", sim.file_bits, "Bits per file")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--trials", sim.trials, "Independent trials")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--stochastic", sim.stochastic, "Random users and Zipf-like demands");
  sim_cmd->add_option("--popularity", sim.popularity, "Popularity CSV (rank,weight)")->check(CLI::ExistingFile);
  sim_cmd->add_option("--users", sim.users, "Total users")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--caches", sim.caches, "Caches when no spec is given")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--cut", sim.cut, "First file of the second level");
  sim_cmd->add_option("--lattice", sim.lattice, "Cut lattice size")->capture_default_str()->check(CLI::PositiveNumber);

  DiscretizeArgs disc;
  auto* disc_cmd = app.add_subcommand("discretize", "Split a popularity profile into levels");
  disc_cmd->add_option("--popularity", disc.popularity, "Popularity CSV (rank,weight)")->check(CLI::ExistingFile)->required();
  disc_cmd->add_option("--levels", disc.levels, "Number of levels")->required()->check(CLI::PositiveNumber);
  disc_cmd->add_option("--caches", disc.caches, "Caches")->required()->check(CLI::PositiveNumber);
  disc_cmd->add_option("--memory-frac", disc.memory_frac, "Memory as a fraction of the library")
      ->required()
      ->check(CLI::NonNegativeNumber);
  disc_cmd->add_option("--users", disc.users, "Total users")->required()->check(CLI::PositiveNumber);
  disc_cmd->add_option("--lattice", disc.lattice, "Cut lattice size")->capture_default_str()->check(CLI::PositiveNumber);
  disc_cmd->add_flag("--allow-empty", disc.allow_empty, "Allow empty levels");
  disc_cmd->add_option("--spec-out", disc.spec_out, "Also write the induced spec to this file");

  int d_max = 1;
  double d_avg = 1.0;
  auto* access_cmd = app.add_subcommand("access-opt", "Choose access degrees under a cost budget");
  access_cmd->add_option("--spec", spec_path, "Spec JSON file")->check(CLI::ExistingFile)->required();
  access_cmd->add_option("--memory", memory, "Cache memory in files")->required()->check(CLI::NonNegativeNumber);
  access_cmd->add_option("--d-max", d_max, "Largest degree")->required()->check(CLI::PositiveNumber);
  access_cmd->add_option("--d-avg", d_avg, "Largest user-weighted mean degree")->required();

  std::int64_t n2 = 4;
  std::int64_t example_bits = 1 << 10;
  auto* small_cmd = app.add_subcommand("small-example", "Exact optimum of the two-cache example");
  small_cmd->add_option("--n2", n2, "Level-2 files")->capture_default_str();
  small_cmd->add_option("--memory", memory, "Cache memory in files")->required()->check(CLI::NonNegativeNumber);
  small_cmd->add_option("--file-bits", example_bits, "Bits per file for the corner check")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  globals.format = format == "csv" ? Format::kCsv : format == "json" ? Format::kJson : Format::kAuto;

  Context ctx(globals, err);
  int code = kExitOk;
  try {
    if (!globals.out_path.empty()) {
      const auto target = normalized(globals.out_path);
      for (const auto* input : {&spec_path, &sim.spec_path, &sim.popularity, &disc.popularity}) {
        if (!input->empty() && normalized(*input) == target) throw UsageError("--out would overwrite an input file");
      }
    }
    if (*validate_cmd) {
      cmd_validate(ctx, spec_path, strict);
    } else if (*table_cmd) {
      cmd_table(ctx, spec_path);
    } else if (*rate_cmd) {
      cmd_rate(ctx, spec_path, memory);
    } else if (*curve_cmd) {
      cmd_curve(ctx, spec_path, grid);
    } else if (*bound_cmd) {
      if (bound_grid->count() == 0 && bound_mem->count() == 0) throw UsageError("--m-grid or --memory is required");
      cmd_bound(ctx, spec_path, bound_grid->count() ? parse_grid(grid) : std::vector<double>{memory});
    } else if (*gap_cmd) {
      cmd_gap(ctx, spec_path, grid);
    } else if (*sim_cmd) {
      code = cmd_simulate(ctx, sim);
    } else if (*disc_cmd) {
      cmd_discretize(ctx, disc);
    } else if (*access_cmd) {
      cmd_access(ctx, spec_path, memory, d_max, d_avg);
    } else if (*small_cmd) {
      cmd_small_example(ctx, n2, memory, example_bits);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDecode;
  }

  const auto text = ctx.text();
  if (globals.out_path.empty()) {
    out << text;
  } else {
    try {
      write_file(globals.out_path, text);
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return code;
}

}  // namespace mlcache::cli
