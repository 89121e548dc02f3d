// Acceptance suite: one [PASS]/[FAIL] line per criterion; exit code is the
// number of failed criteria. CLI-driven criteria read the binary path from
// TBSIM_CLI and the config directory from TBSIM_CFGDIR.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbsim/designer.hpp"
#include "tbsim/dynamics.hpp"
#include "tbsim/franson.hpp"
#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tbsim;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << idx << ". " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

PhysicalParams lossless_params() {
    PhysicalParams p;
    p.gamma32 = 0.0;
    p.gamma41 = 0.0;
    p.gamma_c = 0.0;
    return p;
}

PulseShape gaussian_pulse(double center, double duration, double peak) {
    PulseShape s;
    s.center = center;
    s.duration = duration;
    s.peak = peak;
    return s;
}

PulseTrain equal_reads_train(const PhysicalParams& p) {
    PulseTrain train;
    train.write = gaussian_pulse(0.0, 30.0, 0.0);
    train.write.peak = write_peak_for_alpha_integral(p, train.write, 0.7);
    PulseShape tmpl = gaussian_pulse(0.0, 30.0, 0.0);
    const std::vector<double> b(3, std::log(50.0) / 3.0);
    const std::vector<double> peaks =
        exposures_to_peaks(b, p, std::vector<PulseShape>(3, tmpl));
    for (int i = 0; i < 3; ++i)
        train.reads.push_back(gaussian_pulse(300.0 + 200.0 * i, 30.0, peaks[i]));
    return train;
}

// --- CLI plumbing -----------------------------------------------------------

std::string cli_path() {
    const char* p = std::getenv("TBSIM_CLI");
    return p ? p : "";
}

std::string cfg_dir() {
    const char* p = std::getenv("TBSIM_CFGDIR");
    return p ? p : "configs";
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli_path() + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- nested-quadrature oracle for the double-integral solution --------------

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

// --- criteria ----------------------------------------------------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    PhysicalParams p = lossless_params();
    PulseTrain train;
    train.write = gaussian_pulse(0.0, 30.0, 0.0);
    train.write.peak = write_peak_for_alpha_integral(p, train.write, 0.7);
    const double got = integrate(p, train).n_s_final();
    const double want = std::exp(0.7) - 1.0;
    const double rel = std::abs(got / want - 1.0);
    const double dt = seconds_since(t0);
    report(1, "Stokes closed form e^0.7 - 1", rel < 1e-5 && dt < 1.0,
           "rel err " + fmt(rel) + ", " + fmt(dt) + " s");
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    PhysicalParams p = lossless_params();
    const PulseTrain train = equal_reads_train(p);
    GridSpec grid;
    grid.samples = 8001;
    const DynamicsTrace tr = integrate(p, train, grid);
    const BinBreakdown bins = bin_areas(tr, train);

    const double b = std::log(50.0) / 3.0;
    const double n_s = tr.n_s_final();
    bool ok = bins.areas.size() == 3;
    double worst = 0.0;
    for (int k = 0; ok && k < 3; ++k) {
        const double want = n_s * (std::exp(-k * b) - std::exp(-(k + 1) * b));
        worst = std::max(worst, std::abs(bins.areas[k] / want - 1.0));
    }
    ok = ok && worst < 1e-3 && bins.areas[0] > bins.areas[1] &&
         bins.areas[1] > bins.areas[2];
    const double dt = seconds_since(t0);
    ok = ok && dt < 5.0;
    report(2, "Geometric bin areas for equal reads", ok,
           "worst rel err " + fmt(worst) + ", " + fmt(dt) + " s");
}

void criterion_3() {
    if (cli_path().empty()) {
        report(3, "Equal-bin design via CLI", false, "TBSIM_CLI not set");
        return;
    }
    bool ok = true;
    std::string detail;
    try {
        // Lossless: seed design is exact.
        fs::remove_all("acc_out/equal_bins");
        ok = run_cli("design --config " + cfg_dir() + "/equal_bins_design.cfg"
                     " --out acc_out/equal_bins") == 0 && ok;
        ok = run_cli("simulate --config acc_out/equal_bins/designed_train.cfg"
                     " --out acc_out/equal_bins") == 0 && ok;
        const json s = json::parse(slurp("acc_out/equal_bins/summary.json"));
        const std::vector<double> areas = s["bins"]["areas"].get<std::vector<double>>();
        const double n_s = s["n_s_inf"].get<double>();
        const double total = s["bins"]["total"].get<double>() / n_s;
        const double mean = total / 3.0;
        double spread = 0.0;
        for (double a : areas) spread = std::max(spread, std::abs(a / n_s / mean - 1.0));
        ok = ok && areas.size() == 3 && spread < 0.01 && std::abs(total - 0.98) < 1e-3;
        detail = "lossless spread " + fmt(spread) + ", total " + fmt(total);

        // Finite gamma41: refined peaks must keep the bins mutually equal.
        fs::remove_all("acc_out/equal_bins_refined");
        ok = run_cli("design --config " + cfg_dir() + "/equal_bins_refine.cfg"
                     " --out acc_out/equal_bins_refined") == 0 && ok;
        ok = run_cli("simulate --config acc_out/equal_bins_refined/designed_train.cfg"
                     " --out acc_out/equal_bins_refined") == 0 && ok;
        const json s2 = json::parse(slurp("acc_out/equal_bins_refined/summary.json"));
        const std::vector<double> areas2 = s2["bins"]["areas"].get<std::vector<double>>();
        double mean2 = 0.0;
        for (double a : areas2) mean2 += a;
        mean2 /= static_cast<double>(areas2.size());
        double spread2 = 0.0;
        for (double a : areas2) spread2 = std::max(spread2, std::abs(a / mean2 - 1.0));
        ok = ok && areas2.size() == 3 && spread2 < 0.01;
        detail += ", refined spread " + fmt(spread2);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(3, "Equal-bin design via CLI", ok, detail);
}

void criterion_4() {
    PhysicalParams p = lossless_params();
    PulseTrain train = equal_reads_train(p);
    train.write.peak = 0.0;
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.grid.size(); ++i)
        worst = std::max(worst, std::abs(tr.n_sp[i] + tr.cum_as[i] - 1.0));
    report(4, "Excitation conservation during retrieval", worst < 1e-8,
           "worst defect " + fmt(worst));
}

void criterion_5() {
    PhysicalParams p = lossless_params();
    p.gamma32 = 0.5;
    p.gamma41 = 0.5;
    p.gamma_c = 1e-3;
    PulseTrain train;
    train.write = gaussian_pulse(30.0, 10.0, 0.33);
    train.reads = {gaussian_pulse(60.0, 4.0, 0.6), gaussian_pulse(100.0, 4.0, 0.9)};

    const RateFunctions rates{
        [&](double t) { return gain_alpha(p, train, t); },
        [&](double t) { return gain_beta(p, train, t); },
        [&](double t) { return relaxation_rates(p, train, t).total; },
    };
    const double t0 = -30.0, t1 = 140.0;
    GridSpec g;
    g.samples = 3401;
    const DynamicsTrace tr = integrate_rates(rates, t0, t1, 0.0, g);
    const NestedQuadratureOracle oracle(rates, t0, t1, 34000);
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double t = t0 + (t1 - t0) * k / 10.0;
        worst = std::max(worst, std::abs(tr.n_sp_at(t) / oracle.at(t) - 1.0));
    }
    report(5, "Double-integral oracle vs ODE", worst < 1e-5,
           "worst rel err " + fmt(worst));
}

void criterion_6() {
    const TimeBinState st = ideal_equal_state(3, 180.0, 30.0 / std::numbers::sqrt2);
    PhaseNoiseModel noise;
    const FransonResult res = averaged_counts(st, default_theta_grid(), noise);
    double worst_sum = 0.0;
    for (std::size_t i = 0; i < res.theta_grid.size(); ++i)
        worst_sum = std::max(worst_sum, std::abs(res.counts1[i] + res.counts2[i] - 1.0));
    const bool ok =
        std::abs(res.visibility - 2.0 / 3.0) < 1e-6 && worst_sum < 1e-12;
    report(6, "Noiseless fringe visibility 2/3", ok,
           "visibility " + fmt(res.visibility) + ", sum defect " + fmt(worst_sum));
}

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    // Monte Carlo vs the analytic amplitude at every theta point.
    const TimeBinState st = ideal_equal_state(3, 180.0, 30.0 / std::numbers::sqrt2);
    const std::vector<double> grid = default_theta_grid();
    for (double var : {0.0, 1.5, 3.0}) {
        PhaseNoiseModel noise{NoiseKind::shared_gaussian, var, 100000, 12345};
        const FransonResult res = averaged_counts(st, grid, noise);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto [a1, a2] = analytic_averaged_counts(st, grid[i], var);
            const double tol = var > 0.0 ? 3.0 * res.stderr1[i] : 1e-6;
            if (std::abs(res.counts1[i] - a1) > tol) {
                ok = false;
                detail = "MC off at variance " + fmt(var) + ", theta " + fmt(grid[i]);
            }
        }
    }

    // Fixed seed: two CLI runs are byte-identical.
    if (cli_path().empty()) {
        ok = false;
        detail = "TBSIM_CLI not set";
    } else {
        try {
            fs::remove_all("acc_out/franson_a");
            fs::remove_all("acc_out/franson_b");
            const std::string base =
                "franson --config " + cfg_dir() + "/franson_fringes.cfg --seed 12345 --out ";
            ok = run_cli(base + "acc_out/franson_a") == 0 && ok;
            ok = run_cli(base + "acc_out/franson_b") == 0 && ok;
            for (int i = 0; i < 3; ++i) {
                const std::string name = "/fringe_" + std::to_string(i) + ".csv";
                if (slurp("acc_out/franson_a" + name) != slurp("acc_out/franson_b" + name)) {
                    ok = false;
                    detail = "rerun not byte-identical: fringe_" + std::to_string(i);
                }
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0;
    if (detail.empty()) detail = "3 variances, 1e5 samples, " + fmt(dt) + " s";
    report(7, "Monte Carlo fringe averaging", ok, detail);
}

void criterion_8() {
    const TimeBinState st = ideal_equal_state(3, 180.0, 30.0 / std::numbers::sqrt2);
    const std::vector<double> grid = default_theta_grid();
    PhaseNoiseModel shared{NoiseKind::shared_gaussian, 1.5, 100000, 21};
    PhaseNoiseModel iid{NoiseKind::iid_gaussian, 1.5, 100000, 22};
    const FransonResult a = averaged_counts(st, grid, shared);
    const FransonResult b = averaged_counts(st, grid, iid);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double se = std::hypot(a.stderr1[i], b.stderr1[i]);
        const double pull = std::abs(a.counts1[i] - b.counts1[i]) / se;
        worst = std::max(worst, pull);
        if (pull > 3.0) ok = false;
    }
    report(8, "Shared vs iid phase noise equivalence", ok,
           "worst pull " + fmt(worst) + " sigma");
}

void criterion_9() {
    bool ok = true;
    double worst = 0.0;
    for (double factor : {6.0, 8.0}) {
        const TimeBinState st =
            ideal_equal_state(3, factor * 30.0, 30.0 / std::numbers::sqrt2);
        const auto o = mode_overlaps(st);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                const double want = (j == k + 1) ? 1.0 : 0.0;
                const double err = std::abs(o[j][k] - want);
                worst = std::max(worst, err);
                if (err >= 1e-6) ok = false;
            }
    }
    report(9, "Overlap selection rule O_jk = delta_{j,k+1}", ok,
           "worst defect " + fmt(worst));
}

void criterion_10() {
    bool ok = true;
    std::string detail;

    // Scaling: Omega -> s Omega multiplies both gains by s^2.
    {
        PhysicalParams p = lossless_params();
        PulseTrain train = equal_reads_train(p);
        PulseTrain scaled = train;
        scaled.write.peak *= 3.0;
        for (auto& r : scaled.reads) r.peak *= 3.0;
        for (double t : {-20.0, 0.0, 310.0, 505.0}) {
            if (std::abs(gain_alpha(p, scaled, t) - 9.0 * gain_alpha(p, train, t)) >
                1e-12 * std::max(1.0, gain_alpha(p, scaled, t)))
                ok = false;
            if (std::abs(gain_beta(p, scaled, t) - 9.0 * gain_beta(p, train, t)) >
                1e-12 * std::max(1.0, gain_beta(p, scaled, t)))
                ok = false;
        }
        if (!ok) detail = "s^2 gain scaling";
    }

    // Monotone damage in gamma_c.
    if (ok) {
        PhysicalParams p = lossless_params();
        const PulseTrain train = equal_reads_train(p);
        double prev = 2.0;
        for (double gc : {0.0, 1e-4, 1e-3, 1e-2, 5e-2}) {
            PhysicalParams q = p;
            q.gamma_c = gc;
            const double got = integrate_retrieval(q, train, 1.0).n_as_final();
            if (got > prev + 1e-12) {
                ok = false;
                detail = "gamma_c monotonicity";
            }
            prev = got;
        }
    }

    // Visibility bound over randomized amplitude vectors. J = 2 is the
    // sharp case: |C_1||C_2| <= 1/2 with equality iff the magnitudes match.
    if (ok) {
        std::mt19937 rng(2024);
        std::normal_distribution<double> gauss;
        const double bound = 1.0 / 2.0 + 1e-6;
        const std::vector<double> grid = default_theta_grid();
        const PhaseNoiseModel none;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            TimeBinState st = ideal_equal_state(2, 180.0, 30.0 / std::numbers::sqrt2);
            double norm = 0.0;
            for (auto& c : st.amplitudes) {
                c = {gauss(rng), gauss(rng)};
                norm += std::norm(c);
            }
            for (auto& c : st.amplitudes) c /= std::sqrt(norm);
            const FransonResult res = averaged_counts(st, grid, none);
            worst = std::max(worst, res.visibility);
            if (res.visibility > bound) ok = false;
        }
        detail = "max random-state visibility " + fmt(worst);
        if (!ok) detail = "visibility bound broken: " + detail;
    }

    // Normalization after state_from_trace on randomized traces.
    if (ok) {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.05, 0.6);
        PhysicalParams p = lossless_params();
        for (int trial = 0; trial < 5; ++trial) {
            PulseTrain train = equal_reads_train(p);
            for (auto& r : train.reads) r.peak = u(rng);
            const DynamicsTrace tr = integrate_retrieval(p, train, 1.0);
            const BinBreakdown bins = bin_areas(tr, train);
            const TimeBinState st = state_from_trace(tr, bins, train, {0.0, 0.0, 0.0});
            double norm = 0.0;
            for (const auto& c : st.amplitudes) norm += std::norm(c);
            if (std::abs(norm - 1.0) > 1e-10) {
                ok = false;
                detail = "state normalization, trial " + std::to_string(trial);
            }
        }
    }
    report(10, "Property suite", ok, detail);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criteria failed")
              << std::endl;
    return g_failures;
}
