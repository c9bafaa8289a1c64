#pragma once

// Reproducible random streams.
//
// Each stream is a std::mt19937_64, whose output sequence is fixed by the
// C++ standard, seeded with splitmix64(seed ^ (stream * 0x9E3779B97F4A7C15)).
// Distinct stream ids under one seed give independent streams. Derived
// quantities (uniform doubles, bounded integers) are computed here rather
// than through <random> distributions, whose algorithms vary by vendor.

#include <cstdint>
#include <random>

namespace padopt {

std::uint64_t splitmix64(std::uint64_t x);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound), bound > 0; rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

} // namespace padopt
