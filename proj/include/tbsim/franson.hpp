#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tbsim/dynamics.hpp"
#include "tbsim/pulses.hpp"

namespace tbsim {

// Real temporal mode function of the offset from the bin center,
// supported on [lo, hi] and normalized to unit L2 norm.
struct BinMode {
    std::function<double(double)> value;
    double lo = 0.0;
    double hi = 0.0;
};

// Single anti-Stokes photon delocalized over J time bins.
struct TimeBinState {
    std::vector<std::complex<double>> amplitudes; // C_j, sum |C_j|^2 = 1
    std::vector<double> centers;                  // t_j, 1/gamma
    double tau = 0.0;                             // common bin spacing
    std::vector<BinMode> modes;
    bool equally_spaced = true;

    std::size_t bins() const { return amplitudes.size(); }
    void validate() const;
};

enum class NoiseKind { none, shared_gaussian, iid_gaussian };

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

struct PhaseNoiseModel {
    NoiseKind kind = NoiseKind::none;
    double variance = 0.0;      // sigma^2, radians^2
    int sample_count = 100000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct FransonResult {
    std::vector<double> theta_grid;
    std::vector<double> counts1, counts2;
    std::vector<double> stderr1, stderr2;
    double visibility = 0.0; // (max - min)/(max + min) of counts1
};

// Builds the time-bin state from simulated bin areas and flux envelopes.
TimeBinState state_from_trace(const DynamicsTrace& trace, const BinBreakdown& breakdown,
                              const PulseTrain& train,
                              const std::vector<double>& read_phases);

// Idealized state: equal |C_j|, identical gaussian modes, equal spacing.
TimeBinState ideal_equal_state(int j_bins, double tau, double mode_width);

// Overlap matrix O_jk = integral of Phi_j(t - t_j) Phi_k(t - t_k - shift).
// Defaults to shift = state.tau (interferometer delay matched to the bins).
std::vector<std::vector<double>> mode_overlaps(const TimeBinState& state);
std::vector<std::vector<double>> mode_overlaps(const TimeBinState& state, double shift);

// Detector means (n1, n2) for one setting of the phase shifter. pair_phases
// holds the random phase of each consecutive bin pair (J-1 entries, may be
// empty for zero noise).
std::pair<double, double> interferometer_counts(const TimeBinState& state, double theta,
                                                const std::vector<double>& pair_phases = {});

// Fringe curve averaged over the phase-noise distribution (Monte Carlo;
// exact for variance 0 or kind none).
FransonResult averaged_counts(const TimeBinState& state,
                              const std::vector<double>& theta_grid,
                              const PhaseNoiseModel& noise);

// Closed form for equal bins under Gaussian noise:
// n = (1/2)[1 +- ((J-1)/J) e^{-sigma^2/2} cos(theta)].
std::pair<double, double> analytic_averaged_counts(const TimeBinState& state,
                                                   double theta, double variance);

std::vector<double> default_theta_grid(); // 121 points over [0, 2*pi]
double fringe_visibility(const std::vector<double>& counts);

} // namespace tbsim
