#include <doctest.h>

#include <cmath>
#include <vector>

#include "tbsim/designer.hpp"
#include "tbsim/dynamics.hpp"
#include "test_support.hpp"

using namespace tbsim;

namespace {

// Equal-exposure read peaks for a given total exposure over n pulses.
std::vector<double> equal_read_peaks(const PhysicalParams& p, double total_exposure,
                                     int n, double duration = 30.0) {
    PulseShape tmpl;
    tmpl.duration = duration;
    const std::vector<double> b(n, total_exposure / n);
    return exposures_to_peaks(b, p, std::vector<PulseShape>(n, tmpl));
}

// Independent evaluation of the double-integral form of the spin-wave
// number: N(t) = \int_{t0}^{t} a(t') exp(\int_{t'}^{t} (a - b - g)) dt',
// on a fine uniform grid with cumulative Simpson rules.
struct NestedQuadratureOracle {
    std::vector<double> t, n;

    NestedQuadratureOracle(const RateFunctions& r, double t0, double t1, int m) {
        if (m % 2) ++m;
        const double h = (t1 - t0) / m;
        std::vector<double> g(m + 1), a(m + 1);
        for (int i = 0; i <= m; ++i) {
            const double ti = t0 + i * h;
            a[i] = r.alpha(ti);
            g[i] = a[i] - r.beta(ti) - r.gamma_tot(ti);
        }
        // K_i = int_{t0}^{t_i} (a - b - g); odd nodes by a third-order rule.
        std::vector<double> k(m + 1, 0.0);
        for (int i = 0; i + 2 <= m; i += 2) {
            k[i + 1] = k[i] + h / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
            k[i + 2] = k[i] + h / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
        }
        std::vector<double> inner(m + 1, 0.0), phi(m + 1);
        for (int i = 0; i <= m; ++i) phi[i] = a[i] * std::exp(-k[i]);
        for (int i = 0; i + 2 <= m; i += 2) {
            inner[i + 1] = inner[i] + h / 12.0 * (5.0 * phi[i] + 8.0 * phi[i + 1] - phi[i + 2]);
            inner[i + 2] = inner[i] + h / 3.0 * (phi[i] + 4.0 * phi[i + 1] + phi[i + 2]);
        }
        t.resize(m + 1);
        n.resize(m + 1);
        for (int i = 0; i <= m; ++i) {
            t[i] = t0 + i * h;
            n[i] = std::exp(k[i]) * inner[i];
        }
    }

    double at(double query) const {
        const double h = t[1] - t[0];
        const auto i = static_cast<std::size_t>((query - t[0]) / h + 0.5);
        return n[i];
    }
};

} // namespace

TEST_CASE("no drive means no dynamics") {
    PhysicalParams p = test::default_params();
    PulseTrain train;
    train.write = test::write_pulse(0.0);
    const DynamicsTrace tr = integrate(p, train);
    for (std::size_t i = 0; i < tr.grid.size(); ++i) {
        CHECK(tr.n_sp[i] == 0.0);
        CHECK(tr.flux_s[i] == 0.0);
        CHECK(tr.flux_as[i] == 0.0);
    }
    CHECK(tr.n_s_final() == 0.0);
}

TEST_CASE("write-only run reproduces the Stokes closed form") {
    PhysicalParams p = test::default_params();
    PulseShape w = test::write_pulse(0.0);
    PulseTrain train;
    train.write = w;
    train.write.peak = write_peak_for_alpha_integral(p, w, 0.7);
    const DynamicsTrace tr = integrate(p, train);

    CHECK(tr.n_s_final() == doctest::Approx(std::exp(0.7) - 1.0).epsilon(1e-6));
    // Oracle equivalence at every grid point: n_S(t) = N_sp(t) = e^{int a} - 1.
    for (std::size_t i = 0; i < tr.grid.size(); i += 200) {
        const double ref = closed_form_stokes(p, train, tr.grid[i]);
        CHECK(tr.n_sp[i] == doctest::Approx(ref).epsilon(1e-6));
        CHECK(tr.cum_s[i] == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("closed-form identities") {
    PhysicalParams p = test::default_params();
    PulseTrain off;
    off.write = test::write_pulse(0.0);
    CHECK(closed_form_stokes(p, off, 100.0) == doctest::Approx(0.0));

    PulseShape w = test::write_pulse(0.0);
    PulseTrain train;
    train.write = w;
    train.write.peak = write_peak_for_alpha_integral(p, w, std::log(2.0));
    CHECK(closed_form_stokes(p, train, 1e9) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(closed_form_antistokes(p, off, 1e9, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("retrieval with exposure ln 50 empties 98% of the excitation") {
    PhysicalParams p = test::default_params();
    const std::vector<double> peaks = equal_read_peaks(p, std::log(50.0), 3);
    PulseTrain train = test::three_read_train(p, 0.0, peaks.data());
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
    CHECK(tr.n_as_final() == doctest::Approx(0.98).epsilon(1e-6));
    CHECK(closed_form_antistokes(p, train, 1e9, 1.0) == doctest::Approx(0.98).epsilon(1e-9));
}

TEST_CASE("excitation conservation during relaxation-free retrieval") {
    PhysicalParams p = test::default_params();
    const std::vector<double> peaks = equal_read_peaks(p, 2.0, 3);
    PulseTrain train = test::three_read_train(p, 0.0, peaks.data());
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
    for (std::size_t i = 0; i < tr.grid.size(); ++i)
        CHECK(std::abs(tr.n_sp[i] + tr.cum_as[i] - 1.0) < 1e-8);
}

TEST_CASE("increasing gamma_c never increases the retrieved photon number") {
    PhysicalParams p = test::default_params();
    const std::vector<double> peaks = equal_read_peaks(p, std::log(50.0), 3);
    double prev = 2.0;
    for (double gc : {0.0, 1e-4, 1e-3, 1e-2}) {
        PhysicalParams q = p;
        q.gamma_c = gc;
        PulseTrain train = test::three_read_train(q, 0.0, peaks.data());
        const double got = integrate_retrieval(q, train, 1.0).n_as_final();
        CHECK(got <= prev + 1e-12);
        prev = got;
    }
}

TEST_CASE("bin areas: identical reads deplete the spin wave geometrically") {
    PhysicalParams p = test::default_params();
    const double b = std::log(50.0) / 3.0;
    const std::vector<double> peaks = equal_read_peaks(p, std::log(50.0), 3);
    PulseTrain train = test::three_read_train(p, 0.0, peaks.data());
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
    const BinBreakdown bins = bin_areas(tr, train);

    REQUIRE(bins.areas.size() == 3);
    const double e = std::exp(-b);
    const double expected[3] = {1.0 - e, e - e * e, e * e - e * e * e};
    for (int k = 0; k < 3; ++k)
        CHECK(bins.areas[k] == doctest::Approx(expected[k]).epsilon(1e-4));
    CHECK(bins.areas[0] > bins.areas[1]);
    CHECK(bins.areas[1] > bins.areas[2]);

    // Quadrature consistency against the cumulative column.
    const double span = tr.cum_as_at(bins.windows.back().second) -
                        tr.cum_as_at(bins.windows.front().first);
    CHECK(bins.total == doctest::Approx(span).epsilon(1e-10));
}

TEST_CASE("bin areas: single read captures the whole retrieval") {
    PhysicalParams p = test::default_params();
    const std::vector<double> peaks = equal_read_peaks(p, 3.0, 1);
    PulseTrain train = test::three_read_train(p, 0.0, peaks.data(), 1);
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
    const BinBreakdown bins = bin_areas(tr, train);
    REQUIRE(bins.areas.size() == 1);
    CHECK(bins.areas[0] == doctest::Approx(tr.n_as_final()).epsilon(1e-10));
}

TEST_CASE("bin areas rejects a trace that does not cover the train") {
    PhysicalParams p = test::default_params();
    const std::vector<double> peaks = equal_read_peaks(p, 1.0, 3);
    PulseTrain train = test::three_read_train(p, 0.0, peaks.data());
    GridSpec g;
    g.t_end = 400.0; // cuts off the later reads
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0, g);
    CHECK_THROWS_AS(bin_areas(tr, train), std::invalid_argument);
}

TEST_CASE("spin-wave ODE matches the nested-quadrature double integral") {
    // Nonzero alpha, beta and Gamma_tot simultaneously: overlap the write
    // with the reads deliberately (validation is not exercised here).
    PhysicalParams p = test::default_params();
    p.gamma32 = 0.5;
    p.gamma41 = 0.5;
    p.gamma_c = 1e-3;
    PulseTrain train;
    train.write = test::write_pulse(0.33, 10.0);
    train.write.center = 30.0;
    PulseShape r1, r2;
    r1.center = 60.0;
    r1.duration = 4.0;
    r1.peak = 0.6;
    r2.center = 100.0;
    r2.duration = 4.0;
    r2.peak = 0.9;
    train.reads = {r1, r2};

    RateFunctions rates{
        [&](double t) { return gain_alpha(p, train, t); },
        [&](double t) { return gain_beta(p, train, t); },
        [&](double t) { return relaxation_rates(p, train, t).total; },
    };
    const double t0 = -30.0, t1 = 140.0;
    GridSpec g;
    g.samples = 3401; // grid step divides the oracle step
    const DynamicsTrace tr = integrate_rates(rates, t0, t1, 0.0, g);
    const NestedQuadratureOracle oracle(rates, t0, t1, 34000);

    for (int k = 1; k <= 10; ++k) {
        const double t = t0 + (t1 - t0) * k / 10.0;
        const double ode = tr.n_sp_at(t);
        const double ref = oracle.at(t);
        CHECK(ode == doctest::Approx(ref).epsilon(1e-5));
    }
}

TEST_CASE("fixed-step mode agrees with the adaptive integrator") {
    PhysicalParams p = test::default_params();
    PulseShape w = test::write_pulse(0.0);
    PulseTrain train;
    train.write = w;
    train.write.peak = write_peak_for_alpha_integral(p, w, 0.7);
    GridSpec fixed;
    fixed.fixed_dt = 0.05;
    const double adaptive = integrate(p, train).n_s_final();
    const double stepped = integrate(p, train, fixed).n_s_final();
    CHECK(stepped == doctest::Approx(adaptive).epsilon(1e-8));
}

TEST_CASE("non-covering grids are rejected") {
    PhysicalParams p = test::default_params();
    PulseTrain train;
    train.write = test::write_pulse(0.5);
    GridSpec g;
    g.t_start = -20.0; // write needs coverage from -120
    CHECK_THROWS_AS(integrate(p, train, g), std::invalid_argument);
}

TEST_CASE("cumulative photon numbers are non-decreasing and ordered") {
    PhysicalParams p = test::default_params();
    PulseShape w = test::write_pulse(0.0);
    const std::vector<double> rp = equal_read_peaks(p, 2.5, 3);
    PulseTrain train = test::three_read_train(p, write_peak_for_alpha_integral(p, w, 0.7), rp.data());
    const DynamicsTrace tr = integrate(p, train);
    for (std::size_t i = 1; i < tr.grid.size(); ++i) {
        CHECK(tr.cum_s[i] >= tr.cum_s[i - 1] - 1e-12);
        CHECK(tr.cum_as[i] >= tr.cum_as[i - 1] - 1e-12);
        CHECK(tr.n_sp[i] >= -1e-12);
    }
    // Cannot retrieve more than was stored (Gamma == 0 here).
    CHECK(tr.n_as_final() <= tr.n_s_final() + 1e-10);
}
