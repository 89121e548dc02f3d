#include "tbsim/franson.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "tbsim/rng.hpp"

namespace tbsim {

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "none") return NoiseKind::none;
    if (name == "shared_gaussian") return NoiseKind::shared_gaussian;
    if (name == "iid_gaussian") return NoiseKind::iid_gaussian;
    throw std::invalid_argument("unknown noise kind: " + name);
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::shared_gaussian: return "shared_gaussian";
        case NoiseKind::iid_gaussian: return "iid_gaussian";
    }
    return "?";
}

void PhaseNoiseModel::validate() const {
    if (!(variance >= 0.0))
        throw std::invalid_argument("PhaseNoiseModel: variance must be >= 0");
    if (sample_count < 1)
        throw std::invalid_argument("PhaseNoiseModel: sample_count must be >= 1");
}

void TimeBinState::validate() const {
    const std::size_t j = amplitudes.size();
    if (j == 0) throw std::invalid_argument("TimeBinState: no bins");
    if (centers.size() != j || modes.size() != j)
        throw std::invalid_argument("TimeBinState: field length mismatch");
    double norm = 0.0;
    for (const auto& c : amplitudes) norm += std::norm(c);
    if (std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("TimeBinState: amplitudes not normalized");
    if (equally_spaced)
        for (std::size_t i = 1; i < j; ++i)
            if (std::abs(centers[i] - centers[i - 1] - tau) > 1e-9 * std::max(1.0, tau))
                throw std::invalid_argument("TimeBinState: centers not spaced by tau");
}

namespace {

// Composite Simpson over [a, b].
double simpson_fixed(const std::function<double(double)>& f, double a, double b, int n) {
    if (b <= a) return 0.0;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TimeBinState state_from_trace(const DynamicsTrace& trace, const BinBreakdown& breakdown,
                              const PulseTrain& train,
                              const std::vector<double>& read_phases) {
    const std::size_t j = breakdown.areas.size();
    if (j == 0 || train.reads.size() != j)
        throw std::invalid_argument("state_from_trace: breakdown/train mismatch");
    if (read_phases.size() != j)
        throw std::invalid_argument("state_from_trace: need one phase per bin");
    if (!(breakdown.total > 0.0))
        throw std::invalid_argument("state_from_trace: zero total retrieval");

    TimeBinState st;
    st.tau = j > 1 ? train.reads[1].center - train.reads[0].center : 0.0;
    st.equally_spaced = true;
    for (std::size_t i = 1; i < j; ++i) {
        const double d = train.reads[i].center - train.reads[i - 1].center;
        if (std::abs(d - st.tau) > 1e-9 * std::max(1.0, st.tau)) st.equally_spaced = false;
    }

    // The modes interpolate the simulated flux envelope; copy the columns so
    // the state outlives the trace.
    auto grid = std::make_shared<std::vector<double>>(trace.grid);
    auto flux = std::make_shared<std::vector<double>>(trace.flux_as);
    auto flux_at = [grid, flux](double t) {
        if (t <= grid->front() || t >= grid->back()) return 0.0;
        const auto it = std::upper_bound(grid->begin(), grid->end(), t);
        const std::size_t i = static_cast<std::size_t>(it - grid->begin()) - 1;
        const double s = (t - (*grid)[i]) / ((*grid)[i + 1] - (*grid)[i]);
        return (1.0 - s) * (*flux)[i] + s * (*flux)[i + 1];
    };

    for (std::size_t i = 0; i < j; ++i) {
        const double area = breakdown.areas[i];
        if (!(area > 0.0))
            throw std::invalid_argument("state_from_trace: empty bin in breakdown");
        st.amplitudes.push_back(std::polar(std::sqrt(area / breakdown.total),
                                           read_phases[i]));
        const double tj = train.reads[i].center;
        st.centers.push_back(tj);
        const auto [w0, w1] = breakdown.windows[i];
        st.modes.push_back(BinMode{
            [flux_at, tj, area, w0, w1](double u) {
                const double t = tj + u;
                if (t < w0 || t > w1) return 0.0;
                return std::sqrt(std::max(0.0, flux_at(t)) / area);
            },
            w0 - tj, w1 - tj});
    }
    return st;
}

TimeBinState ideal_equal_state(int j_bins, double tau, double mode_width) {
    if (j_bins < 1) throw std::invalid_argument("ideal_equal_state: need >= 1 bin");
    if (j_bins > 1 && !(tau > 0.0))
        throw std::invalid_argument("ideal_equal_state: tau must be > 0");
    TimeBinState st;
    st.tau = tau;
    const double norm = std::pow(std::numbers::pi * mode_width * mode_width, -0.25);
    for (int i = 0; i < j_bins; ++i) {
        st.amplitudes.emplace_back(1.0 / std::sqrt(static_cast<double>(j_bins)), 0.0);
        st.centers.push_back(i * tau);
        st.modes.push_back(BinMode{
            [norm, mode_width](double u) {
                return norm * std::exp(-u * u / (2.0 * mode_width * mode_width));
            },
            -8.0 * mode_width, 8.0 * mode_width});
    }
    return st;
}

std::vector<std::vector<double>> mode_overlaps(const TimeBinState& state) {
    return mode_overlaps(state, state.tau);
}

std::vector<std::vector<double>> mode_overlaps(const TimeBinState& state, double shift) {
    const std::size_t j = state.bins();
    std::vector<std::vector<double>> o(j, std::vector<double>(j, 0.0));
    for (std::size_t a = 0; a < j; ++a) {
        for (std::size_t b = 0; b < j; ++b) {
            const double lo = std::max(state.centers[a] + state.modes[a].lo,
                                       state.centers[b] + shift + state.modes[b].lo);
            const double hi = std::min(state.centers[a] + state.modes[a].hi,
                                       state.centers[b] + shift + state.modes[b].hi);
            if (hi <= lo) continue;
            const auto& ma = state.modes[a];
            const auto& mb = state.modes[b];
            const double ta = state.centers[a], tb = state.centers[b] + shift;
            o[a][b] = simpson_fixed(
                [&](double t) { return ma.value(t - ta) * mb.value(t - tb); }, lo, hi,
                4000);
        }
    }
    return o;
}

namespace {

// n1(theta, pair phases) = 1/2 (1 + sum_i w_i cos(theta + d_i + s_i * phi_i))
// with phi_i the random phase accumulated between the paired bins.
struct FringeTerms {
    std::vector<double> weight;
    std::vector<double> base_phase;
    std::vector<int> span_lo, span_hi; // pair-phase indices [lo, hi)
    std::vector<int> sign;
};

FringeTerms fringe_terms(const TimeBinState& state) {
    state.validate();
    const auto o = mode_overlaps(state);
    const std::size_t j = state.bins();

    if (j >= 2) {
        double consec = 0.0;
        for (std::size_t k = 0; k + 1 < j; ++k)
            consec = std::max(consec, std::abs(o[k + 1][k]));
        if (consec < 0.1)
            throw std::runtime_error(
                "interferometer delay mismatched to bin spacing: consecutive-mode "
                "overlaps collapsed (max " + std::to_string(consec) + ")");
    }

    FringeTerms ft;
    for (std::size_t a = 0; a < j; ++a) {
        for (std::size_t b = 0; b < j; ++b) {
            if (a == b) continue; // a bin carries no relative phase with itself
            const double w = std::abs(state.amplitudes[a]) *
                             std::abs(state.amplitudes[b]) * o[a][b];
            if (std::abs(w) < 1e-14) continue;
            ft.weight.push_back(w);
            ft.base_phase.push_back(std::arg(state.amplitudes[a]) -
                                    std::arg(state.amplitudes[b]));
            ft.span_lo.push_back(static_cast<int>(std::min(a, b)));
            ft.span_hi.push_back(static_cast<int>(std::max(a, b)));
            ft.sign.push_back(a >= b ? 1 : -1);
        }
    }
    return ft;
}

double fringe_sum(const FringeTerms& ft, double theta,
                  const std::vector<double>& pair_phases) {
    double s = 0.0;
    for (std::size_t i = 0; i < ft.weight.size(); ++i) {
        double phi = 0.0;
        for (int m = ft.span_lo[i]; m < ft.span_hi[i]; ++m)
            if (m < static_cast<int>(pair_phases.size())) phi += pair_phases[m];
        s += ft.weight[i] * std::cos(theta + ft.base_phase[i] + ft.sign[i] * phi);
    }
    return s;
}

} // namespace

std::pair<double, double> interferometer_counts(const TimeBinState& state, double theta,
                                                const std::vector<double>& pair_phases) {
    const FringeTerms ft = fringe_terms(state);
    const double s = fringe_sum(ft, theta, pair_phases);
    return {0.5 * (1.0 + s), 0.5 * (1.0 - s)};
}

std::vector<double> default_theta_grid() {
    std::vector<double> g(121);
    for (int i = 0; i < 121; ++i) g[i] = 2.0 * std::numbers::pi * i / 120.0;
    return g;
}

double fringe_visibility(const std::vector<double>& counts) {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    const double sum = *hi + *lo;
    return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

FransonResult averaged_counts(const TimeBinState& state,
                              const std::vector<double>& theta_grid,
                              const PhaseNoiseModel& noise) {
    state.validate();
    noise.validate();
    if (theta_grid.empty())
        throw std::invalid_argument("averaged_counts: empty theta grid");

    FransonResult res;
    res.theta_grid = theta_grid;
    const std::size_t nt = theta_grid.size();
    const FringeTerms ft = fringe_terms(state);

    if (noise.kind == NoiseKind::none || noise.variance == 0.0) {
        res.counts1.resize(nt);
        res.counts2.resize(nt);
        res.stderr1.assign(nt, 0.0);
        res.stderr2.assign(nt, 0.0);
        for (std::size_t i = 0; i < nt; ++i) {
            const double s = fringe_sum(ft, theta_grid[i], {});
            res.counts1[i] = 0.5 * (1.0 + s);
            res.counts2[i] = 0.5 * (1.0 - s);
        }
        res.visibility = fringe_visibility(res.counts1);
        return res;
    }

    const int pairs = static_cast<int>(state.bins()) - 1;
    const double sigma = std::sqrt(noise.variance);
    const int n = noise.sample_count;

    std::vector<double> sum(nt, 0.0), sumsq(nt, 0.0);
    std::vector<double> pair_phases(std::max(pairs, 0), 0.0);
    for (int s = 0; s < n; ++s) {
        if (noise.kind == NoiseKind::shared_gaussian) {
            const double phi = sigma * counter_normal(noise.seed, static_cast<std::uint64_t>(s));
            std::fill(pair_phases.begin(), pair_phases.end(), phi);
        } else {
            for (int m = 0; m < pairs; ++m)
                pair_phases[m] = sigma * counter_normal(
                    noise.seed, static_cast<std::uint64_t>(s) * pairs + m);
        }
        for (std::size_t i = 0; i < nt; ++i) {
            const double n1 = 0.5 * (1.0 + fringe_sum(ft, theta_grid[i], pair_phases));
            sum[i] += n1;
            sumsq[i] += n1 * n1;
        }
    }

    res.counts1.resize(nt);
    res.counts2.resize(nt);
    res.stderr1.resize(nt);
    res.stderr2.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double mean = sum[i] / n;
        const double var = n > 1 ? std::max(0.0, (sumsq[i] - n * mean * mean) / (n - 1)) : 0.0;
        res.counts1[i] = mean;
        res.counts2[i] = 1.0 - mean;
        res.stderr1[i] = std::sqrt(var / n);
        res.stderr2[i] = res.stderr1[i];
    }
    res.visibility = fringe_visibility(res.counts1);
    return res;
}

std::pair<double, double> analytic_averaged_counts(const TimeBinState& state,
                                                   double theta, double variance) {
    state.validate();
    const std::size_t j = state.bins();
    const double expect = 1.0 / std::sqrt(static_cast<double>(j));
    for (const auto& c : state.amplitudes)
        if (std::abs(std::abs(c) - expect) > 1e-9)
            throw std::invalid_argument(
                "analytic_averaged_counts: closed form assumes equal bin amplitudes");
    const double amp = (static_cast<double>(j) - 1.0) / static_cast<double>(j) *
                       std::exp(-0.5 * variance) * std::cos(theta);
    return {0.5 * (1.0 + amp), 0.5 * (1.0 - amp)};
}

} // namespace tbsim
