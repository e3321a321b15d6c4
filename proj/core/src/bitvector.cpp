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

#include "mlcache/bitvector.hpp"

#include <algorithm>
#include <bit>

namespace mlcache {

std::size_t BitVector::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitVector BitVector::slice(std::size_t offset, std::size_t length) const {
  BitVector out(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (get(offset + i)) out.set(i);
  }
  return out;
}

void BitVector::assign_range(std::size_t offset, const BitVector& src) {
  for (std::size_t i = 0; i < src.size(); ++i) set(offset + i, src.get(i));
}

BitVector& BitVector::operator^=(const BitVector& src) noexcept {
  const std::size_t n = std::min(words_.size(), src.words_.size());
  for (std::size_t i = 0; i < n; ++i) words_[i] ^= src.words_[i];
  return *this;
}

}  // namespace mlcache
