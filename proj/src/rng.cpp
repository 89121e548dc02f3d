#include "tbsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace tbsim {

double counter_normal(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t base = mix64(seed ^ mix64(counter));
    const double u1 = u01(base);
    const double u2 = u01(mix64(base));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace tbsim
