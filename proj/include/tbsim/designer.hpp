#pragma once

#include <vector>

#include "tbsim/dynamics.hpp"
#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace tbsim {

// Target split of the stored excitation over J read windows.
struct DesignTarget {
    std::vector<double> weights;      // per-bin fractions, sum == total_retrieval
    double total_retrieval = 0.98;    // strictly < 1
    std::vector<PulseShape> slots;    // shape templates; peaks are outputs
    bool refine = false;

    void validate() const;
};

// Inverts n_AS = n_S (1 - e^{-B}) per bin: returns exposures
// b_k = B_k - B_{k-1} with B_k = -ln(1 - sum_{j<=k} w_j).
std::vector<double> design_exposures(const DesignTarget& target);

// Peak Rabi frequencies realizing the given exposures with the slot shapes:
// Omega_k = sqrt(b_k chi Delta_R^2 / (2 N g_AS^2 I_shape)).
std::vector<double> exposures_to_peaks(const std::vector<double>& exposures,
                                       const PhysicalParams& p,
                                       const std::vector<PulseShape>& slots);

struct RefineResult {
    std::vector<double> peaks;
    std::vector<double> exposures;
    std::vector<double> achieved;   // bin fractions of the stored excitation
    std::vector<double> residuals;  // achieved / target - 1
    int iterations = 0;
    bool converged = false;
};

// Damped fixed point on log-exposures against the full retrieval dynamics
// (finite gamma41, gamma_c). Starts from closed-form seed peaks.
RefineResult refine_design(const std::vector<double>& seed_peaks,
                           const PhysicalParams& p, const DesignTarget& target,
                           double rel_tol = 1e-4, int max_iter = 50,
                           double damping = 0.7);

// Bin fractions achieved by a retrieval train acting on one stored excitation.
std::vector<double> achieved_bin_fractions(const PhysicalParams& p,
                                           const std::vector<PulseShape>& reads,
                                           const GridSpec& grid = {});

} // namespace tbsim
