#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace tbsim {

// Step control for the spin-wave integration. NaN bounds are derived
// from the pulse train (6 durations of margin on each side).
struct GridSpec {
    double t_start = std::numeric_limits<double>::quiet_NaN();
    double t_end = std::numeric_limits<double>::quiet_NaN();
    int samples = 4001;     // output grid resolution
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double fixed_dt = 0.0;  // > 0: fixed-step RK4 (reproducible golden files)
};

// Sampled solution of the spin-wave / photon-flux equations.
struct DynamicsTrace {
    std::vector<double> grid;    // strictly increasing, 1/gamma
    std::vector<double> n_sp;    // spin-wave excitation number
    std::vector<double> flux_s;  // dn_S/dt
    std::vector<double> flux_as; // dn_AS/dt
    std::vector<double> cum_s;   // running integral of flux_s
    std::vector<double> cum_as;  // running integral of flux_as

    double n_s_final() const { return cum_s.back(); }
    double n_as_final() const { return cum_as.back(); }

    // Cubic Hermite interpolation (the flux columns are exact derivatives).
    double cum_s_at(double t) const;
    double cum_as_at(double t) const;
    double n_sp_at(double t) const;
};

// Anti-Stokes photon number per read window.
struct BinBreakdown {
    std::vector<std::pair<double, double>> windows;
    std::vector<double> areas;
    double total = 0.0;
};

// Integrates dN/dt = alpha (N+1) - (beta + Gamma_tot) N with N = 0 at the
// start of the grid, together with the cumulative photon numbers.
DynamicsTrace integrate(const PhysicalParams& p, const PulseTrain& train,
                        const GridSpec& grid = {});

// Retrieval stage only: alpha forced to zero, N(t0) = n0. The write pulse
// of `train` is ignored except for window bookkeeping.
DynamicsTrace integrate_retrieval(const PhysicalParams& p, const PulseTrain& train,
                                  double n0, const GridSpec& grid = {});

// Relaxation-free closed forms.
double closed_form_stokes(const PhysicalParams& p, const PulseTrain& train, double t);
double closed_form_antistokes(const PhysicalParams& p, const PulseTrain& train,
                              double t, double n_s_inf);

// Splits cum_as into per-read windows. Boundaries sit at midpoints between
// consecutive read centers; the first window opens at the trace start (the
// anti-Stokes flux before the first midpoint is all leading-tail flux of the
// first read), the last closes at the grid end.
BinBreakdown bin_areas(const DynamicsTrace& trace, const PulseTrain& train);

// Low-level entry used by the public integrators and by tests.
struct RateFunctions {
    std::function<double(double)> alpha;
    std::function<double(double)> beta;
    std::function<double(double)> gamma_tot;
};
DynamicsTrace integrate_rates(const RateFunctions& rates, double t0, double t1,
                              double n0, const GridSpec& grid);

} // namespace tbsim
