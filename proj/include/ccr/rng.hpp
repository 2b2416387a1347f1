// Copyright 2026 The CCR Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Counter-based random streams (Philox4x32-10) for reproducible parallel
 * Monte Carlo. Trial t of a run seeded with s draws only from
 * stream(s, t), so results do not depend on scheduling or worker count.
 */

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ccr {

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static auto block(Counter ctr, Key key) -> Counter {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += weyl0;
                key[1] += weyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t mult0 = 0xD2511F53U;
    static constexpr std::uint32_t mult1 = 0xCD9E8D57U;
    static constexpr std::uint32_t weyl0 = 0x9E3779B9U;
    static constexpr std::uint32_t weyl1 = 0xBB67AE85U;

    static auto single_round(const Counter &c, const Key &k) -> Counter {
        const std::uint64_t p0 = std::uint64_t{mult0} * c[0];
        const std::uint64_t p1 = std::uint64_t{mult1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/**
 * Random stream for one (seed, trial) pair. Satisfies
 * UniformRandomBitGenerator with 32-bit output.
 */
class TrialStream {
  public:
    using result_type = std::uint32_t;

    TrialStream(std::uint64_t seed, std::uint64_t trial)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          trial_{trial} {}

    static constexpr auto min() -> result_type { return 0; }
    static constexpr auto max() -> result_type {
        return std::numeric_limits<result_type>::max();
    }

    auto operator()() -> result_type {
        if (used_ == 4) {
            refill();
        }
        return buffer_[used_++];
    }

    auto next_u64() -> std::uint64_t {
        const std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform in [0, 1) with 53 random bits.
    auto uniform() -> double {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by rejection, bound > 0.
    auto below(std::uint64_t bound) -> std::uint64_t {
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = next_u64();
        while (r >= limit) {
            r = next_u64();
        }
        return r % bound;
    }

    /// +1 or -1 with equal probability.
    auto sign() -> int { return ((*this)() & 1U) != 0 ? -1 : 1; }

  private:
    void refill() {
        const Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(trial_),
            static_cast<std::uint32_t>(trial_ >> 32)};
        buffer_ = Philox4x32::block(ctr, key_);
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t trial_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    unsigned used_ = 4;
};

} // namespace ccr
