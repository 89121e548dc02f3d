#pragma once

#include <cstdint>

namespace tbsim {

// Counter-based deterministic random numbers: a draw is a pure function of
// (seed, counter), so Monte Carlo results do not depend on worker count or
// iteration order.

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double u01(std::uint64_t bits) {
    // (0, 1]: safe as a log argument.
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

// Standard normal via Box-Muller, indexed by (seed, counter).
double counter_normal(std::uint64_t seed, std::uint64_t counter);

} // namespace tbsim
