// Copyright 2026 The SBFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SBFP_RNG_HPP_
#define SBFP_RNG_HPP_

#include <array>
#include <cstdint>

namespace sbfp {

// Counter-based Philox4x32-10 generator (Salmon et al., SC'11).
//
// The key is the master seed and the upper counter words hold a stream id, so
// stream i produces the same numbers regardless of which thread draws it or in
// what order streams are visited. Satisfies UniformRandomBitGenerator.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if (pos_ == 2) {
      Refill();
      pos_ = 0;
    }
    const auto lo = static_cast<std::uint64_t>(block_[2 * pos_]);
    const auto hi = static_cast<std::uint64_t>(block_[2 * pos_ + 1]);
    ++pos_;
    return lo | (hi << 32);
  }

  std::uint64_t stream() const noexcept { return stream_; }

  // Raw 4x32 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> Block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  void Refill() noexcept {
    block_ = Block({static_cast<std::uint32_t>(counter_),
                    static_cast<std::uint32_t>(counter_ >> 32),
                    static_cast<std::uint32_t>(stream_),
                    static_cast<std::uint32_t>(stream_ >> 32)},
                   key_);
    ++counter_;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 2;
};

}  // namespace sbfp

#endif  // SBFP_RNG_HPP_
