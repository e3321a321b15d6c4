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

#include "mlcache/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "mlcache/errors.hpp"

namespace mlcache {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, const std::string& field) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(ParseErrorKind::kInvalidValue, field, "not a number: \"" + std::string(text) + "\"");
  }
  return v;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read file: " + path);
  return ss.str();
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t at = 0;
  while (true) {
    const auto colon = text.find(':', at);
    parts.push_back(text.substr(at, colon == std::string_view::npos ? std::string_view::npos : colon - at));
    if (colon == std::string_view::npos) break;
    at = colon + 1;
  }
  if (parts.size() == 1) return {parse_double(parts[0], "grid")};
  if (parts.size() != 3) throw ParseError(ParseErrorKind::kInvalidValue, "grid", "expected start:stop:step");
  const double start = parse_double(parts[0], "grid.start");
  const double stop = parse_double(parts[1], "grid.stop");
  const double step = parse_double(parts[2], "grid.step");
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw ParseError(ParseErrorKind::kInvalidValue, "grid", "grid bounds must be finite");
  }
  if (!(step > 0.0)) throw ParseError(ParseErrorKind::kNonPositive, "grid.step", "step must be positive");
  if (stop < start) throw ParseError(ParseErrorKind::kInvalidValue, "grid", "stop is below start");
  const double steps = std::floor((stop - start) / step + 0.5);
  if (!(steps < 1e7)) throw ParseError(ParseErrorKind::kInvalidValue, "grid", "too many grid points");
  const auto count = static_cast<std::size_t>(steps) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

std::vector<double> read_popularity_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ParseErrorKind::kMissingField, "header", "empty popularity file");
  auto header = trim(line);
  if (header != "rank,weight") {
    throw ParseError(ParseErrorKind::kInvalidValue, "header", "expected header `rank,weight`");
  }
  std::vector<std::pair<double, double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto comma = body.find(',');
    const std::string where = "line " + std::to_string(lineno);
    if (comma == std::string_view::npos) throw ParseError(ParseErrorKind::kInvalidValue, where, "expected rank,weight");
    const double rank = parse_double(body.substr(0, comma), where + ".rank");
    const double weight = parse_double(body.substr(comma + 1), where + ".weight");
    if (!(weight > 0.0)) throw ParseError(ParseErrorKind::kNonPositive, where + ".weight", "weight must be positive");
    rows.emplace_back(rank, weight);
  }
  if (rows.empty()) throw ParseError(ParseErrorKind::kMissingField, "rows", "no popularity rows");
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.second);
  // Ranks are taken as given but the weights still have to be popularity sorted.
  std::stable_sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> read_popularity_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return read_popularity_csv(in);
}

void write_popularity_csv(std::ostream& out, std::span<const double> weights) {
  out << "rank,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", weights[i]);
    out << (i + 1) << ',' << buf << '\n';
  }
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace mlcache
