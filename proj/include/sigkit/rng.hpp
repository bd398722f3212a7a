#pragma once

#include <cstdint>

namespace sigkit {

// Counter-based generator: every draw is a pure function of (seed, level, role, index),
// so values do not depend on the order or thread in which they are requested.
class CounterRng {
public:
    enum Role : std::uint64_t { frequency = 1, phase = 2, projection = 3, weights = 4, data = 5 };

    CounterRng(std::uint64_t seed, std::uint64_t level, std::uint64_t role);

    std::uint64_t bits(std::uint64_t index) const;
    // Uniform in [0, 1).
    double uniform(std::uint64_t index) const;
    // Standard normal by Box-Muller on draws 2*index and 2*index+1.
    double normal(std::uint64_t index) const;

private:
    std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

} // namespace sigkit
