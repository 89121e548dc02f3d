#include "tbsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tbsim {

namespace {

using State = std::array<double, 3>; // N_sp, cum_s, cum_as

State derivative(const RateFunctions& r, double t, const State& y) {
    const double a = r.alpha(t);
    const double b = r.beta(t);
    const double g = r.gamma_tot(t);
    const double n = y[0];
    return {a * (n + 1.0) - (b + g) * n, a * (n + 1.0), b * n};
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
    State y;
    double error; // max component error scaled by tolerance
};

StepResult dopri_step(const RateFunctions& r, double t, const State& y, double h,
                      double atol, double rtol) {
    auto axpy = [](const State& y0, std::initializer_list<std::pair<double, const State*>> terms,
                   double h) {
        State out = y0;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
        return out;
    };
    const State k1 = derivative(r, t, y);
    const State k2 = derivative(r, t + c2 * h, axpy(y, {{a21, &k1}}, h));
    const State k3 = derivative(r, t + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const State k4 = derivative(r, t + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State k5 = derivative(
        r, t + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State k6 = derivative(
        r, t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State y5 =
        axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State k7 = derivative(r, t + h, y5);

    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / scale);
    }
    return {y5, err};
}

// Advances y from t0 to t1 with adaptive step control.
State advance_adaptive(const RateFunctions& r, double t0, double t1, State y,
                       const GridSpec& g, double& h) {
    const double span = t1 - t0;
    const double h_min = 1e-13 * std::max(std::abs(t0), std::abs(t1)) + 1e-300;
    double t = t0;
    while (t < t1) {
        h = std::min(h, t1 - t);
        const StepResult s = dopri_step(r, t, y, h, g.abs_tol, g.rel_tol);
        if (s.error <= 1.0) {
            t += h;
            y = s.y;
        }
        const double factor =
            s.error > 0.0 ? 0.9 * std::pow(s.error, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < h_min && t < t1)
            throw std::runtime_error(
                "integrate: step control failed on [" + std::to_string(t) + ", " +
                std::to_string(t1) + "] (tolerance unreachable)");
    }
    return y;
}

State advance_fixed(const RateFunctions& r, double t0, double t1, State y, double dt) {
    // Classic RK4, step count rounded so the interval is hit exactly.
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    const double h = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * h;
        auto add = [](const State& a, const State& b, double s) {
            return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
        };
        const State k1 = derivative(r, t, y);
        const State k2 = derivative(r, t + 0.5 * h, add(y, k1, 0.5 * h));
        const State k3 = derivative(r, t + 0.5 * h, add(y, k2, 0.5 * h));
        const State k4 = derivative(r, t + h, add(y, k3, h));
        for (int j = 0; j < 3; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return y;
}

double hermite(const std::vector<double>& grid, const std::vector<double>& val,
               const std::vector<double>& deriv, double t) {
    if (t <= grid.front()) return val.front();
    if (t >= grid.back()) return val.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double h = grid[i + 1] - grid[i];
    const double s = (t - grid[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * val[i] + h * h10 * deriv[i] + h01 * val[i + 1] + h * h11 * deriv[i + 1];
}

} // namespace

double DynamicsTrace::cum_s_at(double t) const { return hermite(grid, cum_s, flux_s, t); }
double DynamicsTrace::cum_as_at(double t) const { return hermite(grid, cum_as, flux_as, t); }

double DynamicsTrace::n_sp_at(double t) const {
    if (t <= grid.front()) return n_sp.front();
    if (t >= grid.back()) return n_sp.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double s = (t - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - s) * n_sp[i] + s * n_sp[i + 1];
}

DynamicsTrace integrate_rates(const RateFunctions& rates, double t0, double t1,
                              double n0, const GridSpec& grid) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate: empty time range");
    if (grid.samples < 2) throw std::invalid_argument("integrate: need >= 2 samples");

    DynamicsTrace tr;
    const int n = grid.samples;
    tr.grid.resize(n);
    tr.n_sp.resize(n);
    tr.flux_s.resize(n);
    tr.flux_as.resize(n);
    tr.cum_s.resize(n);
    tr.cum_as.resize(n);

    State y = {n0, 0.0, 0.0};
    double h = (t1 - t0) / 100.0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        if (i > 0) {
            const double prev = tr.grid[i - 1];
            y = grid.fixed_dt > 0.0 ? advance_fixed(rates, prev, t, y, grid.fixed_dt)
                                    : advance_adaptive(rates, prev, t, y, grid, h);
        }
        const double a = rates.alpha(t);
        const double b = rates.beta(t);
        tr.grid[i] = t;
        tr.n_sp[i] = y[0];
        tr.flux_s[i] = a * (y[0] + 1.0);
        tr.flux_as[i] = b * y[0];
        tr.cum_s[i] = y[1];
        tr.cum_as[i] = y[2];
    }
    return tr;
}

namespace {

void check_coverage(const PulseTrain& train, double t0, double t1) {
    auto covered = [&](const PulseShape& p) {
        return t0 <= p.center - 4.0 * p.duration && t1 >= p.center + 4.0 * p.duration;
    };
    if (!covered(train.write))
        throw std::invalid_argument("integrate: grid does not cover the write pulse "
                                    "with 4-duration margin");
    for (const auto& r : train.reads)
        if (!covered(r))
            throw std::invalid_argument("integrate: grid does not cover a read pulse "
                                        "with 4-duration margin");
}

} // namespace

DynamicsTrace integrate(const PhysicalParams& p, const PulseTrain& train,
                        const GridSpec& grid) {
    p.validate();
    train.validate();
    const double t0 = std::isnan(grid.t_start) ? train.t_begin() : grid.t_start;
    const double t1 = std::isnan(grid.t_end) ? train.t_end() : grid.t_end;
    check_coverage(train, t0, t1);
    RateFunctions rates{
        [&](double t) { return gain_alpha(p, train, t); },
        [&](double t) { return gain_beta(p, train, t); },
        [&](double t) { return relaxation_rates(p, train, t).total; },
    };
    return integrate_rates(rates, t0, t1, 0.0, grid);
}

DynamicsTrace integrate_retrieval(const PhysicalParams& p, const PulseTrain& train,
                                  double n0, const GridSpec& grid) {
    p.validate();
    if (train.reads.empty())
        throw std::invalid_argument("integrate_retrieval: train has no read pulses");
    const auto& first = train.reads.front();
    const double t0 = std::isnan(grid.t_start) ? first.center - 6.0 * first.duration
                                               : grid.t_start;
    const double t1 = std::isnan(grid.t_end) ? train.t_end() : grid.t_end;
    RateFunctions rates{
        [](double) { return 0.0; },
        [&](double t) { return gain_beta(p, train, t); },
        [&](double t) {
            const double gr = std::norm(omega_r(train, t)) /
                              (p.delta_r * p.delta_r) * p.gamma41;
            return p.gamma_c + gr;
        },
    };
    return integrate_rates(rates, t0, t1, n0, grid);
}

double closed_form_stokes(const PhysicalParams& p, const PulseTrain& train, double t) {
    return std::exp(alpha_integral(p, train, t)) - 1.0;
}

double closed_form_antistokes(const PhysicalParams& p, const PulseTrain& train,
                              double t, double n_s_inf) {
    return n_s_inf * (1.0 - std::exp(-beta_integral(p, train, t)));
}

BinBreakdown bin_areas(const DynamicsTrace& trace, const PulseTrain& train) {
    if (train.reads.empty())
        throw std::invalid_argument("bin_areas: train has no read pulses");
    for (const auto& r : train.reads)
        if (r.center < trace.grid.front() || r.center > trace.grid.back())
            throw std::invalid_argument("bin_areas: trace does not cover the read train");

    const std::size_t j = train.reads.size();
    std::vector<double> bounds(j + 1);
    bounds[0] = trace.grid.front();
    for (std::size_t i = 1; i < j; ++i)
        bounds[i] = 0.5 * (train.reads[i - 1].center + train.reads[i].center);
    bounds[j] = trace.grid.back();

    BinBreakdown out;
    for (std::size_t i = 0; i < j; ++i) {
        out.windows.emplace_back(bounds[i], bounds[i + 1]);
        out.areas.push_back(trace.cum_as_at(bounds[i + 1]) - trace.cum_as_at(bounds[i]));
    }
    for (double a : out.areas) out.total += a;
    return out;
}

} // namespace tbsim
