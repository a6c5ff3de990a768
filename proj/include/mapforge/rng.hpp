// Copyright 2026 The Mapforge Authors
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

#ifndef MAPFORGE__RNG_HPP_
#define MAPFORGE__RNG_HPP_

#include <array>
#include <cstdint>

namespace mapforge
{

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A draw is a pure function of (key, counter), so independent streams are
/// addressed by counter words instead of by advancing shared state.
class Philox4x32
{
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key)
  {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

  static constexpr Key key_from_seed(std::uint64_t seed)
  {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter & c, const Key & k)
  {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
constexpr double bits_to_unit(std::uint32_t lo, std::uint32_t hi)
{
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A stream of uniform doubles addressed by (seed, stream_a, stream_b, tag).
///
/// Block b of the stream is Philox(counter = {b, stream_a, stream_b, tag},
/// key = seed); each block yields two doubles, words (0,1) then (2,3).
class CounterStream
{
public:
  constexpr CounterStream(std::uint64_t seed, std::uint32_t stream_a, std::uint32_t stream_b, std::uint32_t tag)
  : key_(Philox4x32::key_from_seed(seed)), stream_a_(stream_a), stream_b_(stream_b), tag_(tag)
  {
  }

  constexpr double next_unit()
  {
    if (half_ == 0) {
      block_ = Philox4x32::generate({next_block_, stream_a_, stream_b_, tag_}, key_);
      ++next_block_;
      half_ = 1;
      return bits_to_unit(block_[0], block_[1]);
    }
    half_ = 0;
    return bits_to_unit(block_[2], block_[3]);
  }

  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
  Philox4x32::Key key_;
  std::uint32_t stream_a_;
  std::uint32_t stream_b_;
  std::uint32_t tag_;
  std::uint32_t next_block_{0};
  int half_{0};
  Philox4x32::Counter block_{};
};

}  // namespace mapforge

#endif  // MAPFORGE__RNG_HPP_
