#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tbsim/params.hpp"

namespace tbsim {

enum class ShapeKind { gaussian, squared_cosine, square };

ShapeKind shape_kind_from_string(const std::string& name);
std::string to_string(ShapeKind kind);

// One driving pulse. `duration` is the characteristic width parameter T:
// the 1/sqrt(e) half-width for gaussian, the half-support for squared
// cosine, the full width for square.
struct PulseShape {
    ShapeKind kind = ShapeKind::gaussian;
    double center = 0.0;   // 1/gamma
    double duration = 1.0; // 1/gamma
    double peak = 0.0;     // peak Rabi frequency, gamma units
    double phase = 0.0;    // carrier phase, radians

    // Unit-peak temporal profile f(t - center), in [0, 1].
    double eval(double t) const;
    // |t - center| beyond which f(t) is negligible (< ~1e-8 for gaussian).
    double support_halfwidth() const;
    // Integral of f^2 over all t for the unit-peak profile.
    double shape_sq_integral() const;

    void validate() const;
};

// Write pulse plus an ordered train of well-separated read sub-pulses.
struct PulseTrain {
    PulseShape write;
    std::vector<PulseShape> reads;     // centers strictly increasing
    double separation_factor = 6.0;    // min spacing / max adjacent duration

    double write_end() const { return write.center + write.support_halfwidth(); }
    double delay() const;              // first read center - write end
    double t_begin() const { return write.center - 6.0 * write.duration; }
    double t_end() const;

    void validate() const;
};

// Effective write coupling G(t) = g_s * (Omega_W / Delta_W) * f_W(t).
double coupling_g(const PhysicalParams& p, const PulseTrain& train, double t);

// Total read Rabi frequency Omega_R(t), complex when sub-pulse phases are set.
std::complex<double> omega_r(const PulseTrain& train, double t);

// Effective read coupling F(t) = g_as * Omega_R(t) / Delta_R.
std::complex<double> coupling_f(const PhysicalParams& p, const PulseTrain& train, double t);

// Stokes and anti-Stokes gains: alpha = (2N/chi) G^2, beta = (2N/chi) |F|^2.
double gain_alpha(const PhysicalParams& p, const PulseTrain& train, double t);
double gain_beta(const PhysicalParams& p, const PulseTrain& train, double t);

struct RelaxationRates {
    double gamma_w;
    double gamma_r;
    double total; // gamma_c + gamma_w + gamma_r
};

// Optical-pumping rates Gamma_W, Gamma_R and the total relaxation rate.
RelaxationRates relaxation_rates(const PhysicalParams& p, const PulseTrain& train, double t);

// Running integral of alpha (resp. beta) from the start of the train to t.
double alpha_integral(const PhysicalParams& p, const PulseTrain& train, double t);
double beta_integral(const PhysicalParams& p, const PulseTrain& train, double t);

// Write peak Rabi frequency such that the full alpha integral equals `target`.
double write_peak_for_alpha_integral(const PhysicalParams& p,
                                     const PulseShape& write_shape,
                                     double target);

} // namespace tbsim
