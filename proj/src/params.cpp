#include "tbsim/params.hpp"

#include <stdexcept>
#include <string>

namespace tbsim {

namespace {
void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("PhysicalParams: " + msg);
}
} // namespace

void PhysicalParams::validate() const {
    require(gamma > 0.0, "gamma must be > 0");
    require(gamma32 >= 0.0 && gamma32 <= gamma, "gamma32 must lie in [0, gamma]");
    require(gamma41 >= 0.0 && gamma41 <= gamma, "gamma41 must lie in [0, gamma]");
    require(gamma_c >= 0.0, "gamma_c must be >= 0");
    require(delta_w != 0.0, "delta_w must be nonzero (far off-resonant regime)");
    require(delta_r != 0.0, "delta_r must be nonzero (far off-resonant regime)");
    require(n_atoms > 0.0, "n_atoms must be > 0");
    require(chi > 0.0, "chi must be > 0");
    require(g_s > 0.0, "g_s must be > 0");
    require(g_as > 0.0, "g_as must be > 0");
}

} // namespace tbsim
