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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlcache {

// Throws IoError when the file cannot be read.
std::string read_text_file(const std::string& path);

// "start:stop:step", inclusive of stop within half a step.
std::vector<double> parse_grid(std::string_view text);

// CSV with header `rank,weight`; returns weights ordered by rank.
std::vector<double> read_popularity_csv(std::istream& in);
std::vector<double> read_popularity_csv_file(const std::string& path);
void write_popularity_csv(std::ostream& out, std::span<const double> weights);

// Six significant digits; "inf" for infinities.
std::string format_number(double value);

}  // namespace mlcache
