#include "sigkit/rng.hpp"

#include <cmath>
#include <numbers>

namespace sigkit {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t level, std::uint64_t role) {
    key_ = mix64(mix64(mix64(seed) ^ (level * 0xd1b54a32d192ed03ULL)) ^ (role * 0xabc98388fb8fac03ULL));
}

std::uint64_t CounterRng::bits(std::uint64_t index) const {
    return mix64(key_ ^ mix64(index));
}

double CounterRng::uniform(std::uint64_t index) const {
    return double(bits(index) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
    const double u1 = 1.0 - uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace sigkit
