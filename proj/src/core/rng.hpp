// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so parallel consumers get identical values
// regardless of thread count or evaluation order.

#pragma once

#include <cmath>
#include <cstdint>

namespace ntcr {

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
    return mix64(seed ^ mix64(stream ^ mix64(counter)));
}

}  // namespace detail

// Uniform in (0, 1]; never returns 0 so it is safe inside log().
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
    const std::uint64_t bits = detail::counter_hash(seed, stream, counter);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter draws.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
    const double u1 = uniform01(seed, stream, 2 * counter);
    const double u2 = uniform01(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Independent child seed for a named substream (per camera, per purpose).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return detail::counter_hash(seed, 0x9d2c5680ULL, index);
}

// Sequential convenience wrapper for code that just wants a stream of draws
// (e.g. surface sampling). Deterministic for a given (seed, stream).
class SequentialRng {
public:
    explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    double uniform() { return uniform01(seed_, stream_, counter_++); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace ntcr
