// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "presto/digest.hpp"

namespace presto {

/// Named, seedable stream of random draws. The generator is std::mt19937_64
/// (bit-exact per the C++ standard) and all distributions are implemented
/// inline via inverse CDF so replays do not depend on the standard library's
/// unspecified distribution algorithms.
class Rng {
  public:
    Rng() : engine_(0) {}
    Rng(std::uint64_t seed, std::string_view stream)
        : engine_(Fnv1a().update(seed).update(stream).value()) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t below(std::uint64_t n) { return bits() % n; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace presto
