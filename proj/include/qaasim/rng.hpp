// Copyright 2026 The qaasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAASIM_RNG_HPP
#define QAASIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qaasim {

// Counter-based generator built on the splitmix64 finalizer. Every consumer
// derives its own substream from a tuple of integer ids, so Monte Carlo
// results do not depend on scheduling order or thread count, and a fixed
// seed gives a bit-identical sequence on every run.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Stream ids reserved per purpose; a (seed, step, purpose) tuple never
// collides with a different purpose at the same step.
enum class Stream : std::uint64_t {
    brownian = 1,
    phi = 2,
    instance_gen = 3,
};

template <typename... Ids>
constexpr std::uint64_t substream(std::uint64_t seed, Ids... ids) {
    std::uint64_t h = mix64(seed + kGolden);
    ((h = mix64(h ^ (static_cast<std::uint64_t>(ids) + kGolden))), ...);
    return h;
}

class Prng {
  public:
    explicit constexpr Prng(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform01()));
        double a = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, bound), unbiased by rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qaasim

#endif
