#include "tbsim/pulses.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace tbsim {

ShapeKind shape_kind_from_string(const std::string& name) {
    if (name == "gaussian") return ShapeKind::gaussian;
    if (name == "squared_cosine") return ShapeKind::squared_cosine;
    if (name == "square") return ShapeKind::square;
    throw std::invalid_argument("unknown pulse shape kind: " + name);
}

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::gaussian: return "gaussian";
        case ShapeKind::squared_cosine: return "squared_cosine";
        case ShapeKind::square: return "square";
    }
    return "?";
}

double PulseShape::eval(double t) const {
    const double u = t - center;
    switch (kind) {
        case ShapeKind::gaussian:
            return std::exp(-u * u / (2.0 * duration * duration));
        case ShapeKind::squared_cosine: {
            if (std::abs(u) > duration) return 0.0;
            const double c = std::cos(0.5 * std::numbers::pi * u / duration);
            return c * c;
        }
        case ShapeKind::square:
            return std::abs(u) <= 0.5 * duration ? 1.0 : 0.0;
    }
    return 0.0;
}

double PulseShape::support_halfwidth() const {
    switch (kind) {
        case ShapeKind::gaussian: return 6.0 * duration; // f(6T) = e^{-18}
        case ShapeKind::squared_cosine: return duration;
        case ShapeKind::square: return 0.5 * duration;
    }
    return 0.0;
}

double PulseShape::shape_sq_integral() const {
    switch (kind) {
        case ShapeKind::gaussian: return duration * std::sqrt(std::numbers::pi);
        case ShapeKind::squared_cosine: return 0.75 * duration; // 2T * <cos^4>
        case ShapeKind::square: return duration;
    }
    return 0.0;
}

void PulseShape::validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("PulseShape: duration must be > 0");
    if (!(peak >= 0.0)) throw std::invalid_argument("PulseShape: peak must be >= 0");
    if (!std::isfinite(center)) throw std::invalid_argument("PulseShape: center must be finite");
}

double PulseTrain::delay() const {
    if (reads.empty()) return 0.0;
    return reads.front().center - write_end();
}

double PulseTrain::t_end() const {
    const PulseShape& last = reads.empty() ? write : reads.back();
    return last.center + 6.0 * last.duration;
}

void PulseTrain::validate() const {
    write.validate();
    for (const auto& r : reads) r.validate();
    for (std::size_t i = 1; i < reads.size(); ++i) {
        const double spacing = reads[i].center - reads[i - 1].center;
        if (!(spacing > 0.0))
            throw std::invalid_argument("PulseTrain: read centers must be strictly increasing");
        const double min_spacing =
            separation_factor * std::max(reads[i].duration, reads[i - 1].duration);
        if (spacing < min_spacing)
            throw std::invalid_argument(
                "PulseTrain: read sub-pulses closer than separation_factor allows");
    }
    if (!reads.empty() && !(delay() > write.duration))
        throw std::invalid_argument("PulseTrain: delay between write end and first read "
                                    "must exceed the write duration");
}

double coupling_g(const PhysicalParams& p, const PulseTrain& train, double t) {
    return p.g_s * (train.write.peak / p.delta_w) * train.write.eval(t);
}

std::complex<double> omega_r(const PulseTrain& train, double t) {
    std::complex<double> sum = 0.0;
    for (const auto& r : train.reads) {
        const double f = r.eval(t);
        if (f == 0.0) continue;
        sum += r.peak * f * std::polar(1.0, r.phase);
    }
    return sum;
}

std::complex<double> coupling_f(const PhysicalParams& p, const PulseTrain& train, double t) {
    return p.g_as / p.delta_r * omega_r(train, t);
}

double gain_alpha(const PhysicalParams& p, const PulseTrain& train, double t) {
    const double g = coupling_g(p, train, t);
    return 2.0 * p.n_atoms / p.chi * g * g;
}

double gain_beta(const PhysicalParams& p, const PulseTrain& train, double t) {
    const double f2 = std::norm(coupling_f(p, train, t));
    return 2.0 * p.n_atoms / p.chi * f2;
}

RelaxationRates relaxation_rates(const PhysicalParams& p, const PulseTrain& train, double t) {
    const double fw = train.write.eval(t);
    const double ow = train.write.peak;
    RelaxationRates r{};
    r.gamma_w = ow * ow / (p.delta_w * p.delta_w) * fw * fw * p.gamma32;
    r.gamma_r = std::norm(omega_r(train, t)) / (p.delta_r * p.delta_r) * p.gamma41;
    r.total = p.gamma_c + r.gamma_w + r.gamma_r;
    return r;
}

namespace {

// Adaptive Simpson quadrature, absolute tolerance.
double simpson(const std::function<double(double)>& f, double a, double m, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_fn(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, m, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

double alpha_integral(const PhysicalParams& p, const PulseTrain& train, double t) {
    const double a = train.t_begin();
    if (t <= a) return 0.0;
    // Integrate over the write support only; alpha vanishes elsewhere.
    const double hi = std::min(t, train.write.center + 6.0 * train.write.duration);
    return integrate_fn([&](double u) { return gain_alpha(p, train, u); }, a, hi, 1e-13);
}

double beta_integral(const PhysicalParams& p, const PulseTrain& train, double t) {
    double sum = 0.0;
    for (const auto& r : train.reads) {
        const double lo = r.center - 6.0 * r.duration;
        const double hi = std::min(t, r.center + 6.0 * r.duration);
        if (hi <= lo) continue;
        PulseTrain single;
        single.write = train.write;
        single.write.peak = 0.0;
        single.reads = {r};
        sum += integrate_fn([&](double u) { return gain_beta(p, single, u); }, lo, hi, 1e-13);
    }
    return sum;
}

double write_peak_for_alpha_integral(const PhysicalParams& p,
                                     const PulseShape& write_shape,
                                     double target) {
    if (!(target >= 0.0))
        throw std::invalid_argument("write_peak_for_alpha_integral: target must be >= 0");
    // integral = (2N/chi) (g_s Omega_W / Delta_W)^2 * I_shape
    const double i_shape = write_shape.shape_sq_integral();
    const double coeff = 2.0 * p.n_atoms / p.chi * p.g_s * p.g_s / (p.delta_w * p.delta_w);
    return std::sqrt(target / (coeff * i_shape));
}

} // namespace tbsim
