// Copyright 2026 The MaestroCut Authors
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

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace maestrocut {

/// 64-bit finalizer of SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// FNV-1a over the bytes of a label; used to name sub-streams.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : label) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * Counter-based, splittable random source.
 *
 * Output n (0-based) of the stream with key k is mix64(k + (n + 1) * G) where
 * G = 0x9e3779b97f4a7c15, i.e. SplitMix64 seeded at k. Child streams are keyed
 * by mix64(k ^ mix64(label_hash(label))) for named children and
 * mix64(k ^ mix64(index + G)) for indexed children, so any (seed, path) pair
 * identifies one reproducible stream on every platform. All distributions are
 * implemented here rather than through <random> distributions, whose
 * algorithms are implementation-defined.
 */
class Rng {
  public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit constexpr Rng(std::uint64_t key = 0) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGamma);
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

    [[nodiscard]] Rng child(std::string_view label) const noexcept {
        return Rng(mix64(key_ ^ mix64(label_hash(label))));
    }
    [[nodiscard]] Rng child(std::uint64_t index) const noexcept {
        return Rng(mix64(key_ ^ mix64(index + kGamma)));
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;
    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
    /// Uniform integer in [0, n); n must be positive. Lemire's nearly-divisionless method.
    std::uint64_t uniform_int(std::uint64_t n) noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }
    double exponential(double rate) noexcept;
    /// Lognormal with the given arithmetic mean and coefficient of variation.
    double lognormal_mean_cv(double mean, double cv) noexcept;

    template <typename T> void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Root stream for a master seed.
[[nodiscard]] inline Rng master_stream(std::uint64_t seed) noexcept {
    return Rng(mix64(seed ^ 0x6d61657374726f63ULL));
}

} // namespace maestrocut
