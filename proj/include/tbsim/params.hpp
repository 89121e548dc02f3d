#pragma once

namespace tbsim {

// Dimensionless system constants. All rates are in units of the
// upper-state spontaneous decay rate gamma, all times in 1/gamma.
struct PhysicalParams {
    double gamma = 1.0;    // upper-state decay rate (defines the unit system)
    double gamma32 = 0.5;  // partial decay 3 -> 2
    double gamma41 = 0.5;  // partial decay 4 -> 1
    double gamma_c = 0.0;  // ground-state coherence decay
    double delta_w = 20.0; // one-photon detuning of the write field
    double delta_r = 20.0; // one-photon detuning of the read field
    double n_atoms = 1e4;  // atom number in the interaction volume
    double chi = 1e4;      // cavity damping rate c/L
    double g_s = 5.0;      // Stokes atom-photon coupling
    double g_as = 5.0;     // anti-Stokes atom-photon coupling

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

} // namespace tbsim
