#include "tbsim/designer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbsim {

void DesignTarget::validate() const {
    if (weights.empty()) throw std::invalid_argument("DesignTarget: weights empty");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("DesignTarget: weights must be > 0");
        sum += w;
    }
    if (!(total_retrieval > 0.0 && total_retrieval < 1.0))
        throw std::invalid_argument("DesignTarget: total_retrieval must lie in (0, 1)");
    if (std::abs(sum - total_retrieval) > 1e-12)
        throw std::invalid_argument("DesignTarget: weights must sum to total_retrieval");
    if (!slots.empty() && slots.size() != weights.size())
        throw std::invalid_argument("DesignTarget: slots/weights length mismatch");
}

std::vector<double> design_exposures(const DesignTarget& target) {
    target.validate();
    std::vector<double> out;
    double cum = 0.0, prev_big = 0.0;
    for (double w : target.weights) {
        cum += w;
        if (cum >= 1.0)
            throw std::invalid_argument("design_exposures: cumulative weight >= 1 "
                                        "(full retrieval needs infinite exposure)");
        const double big = -std::log1p(-cum);
        out.push_back(big - prev_big);
        prev_big = big;
    }
    return out;
}

std::vector<double> exposures_to_peaks(const std::vector<double>& exposures,
                                       const PhysicalParams& p,
                                       const std::vector<PulseShape>& slots) {
    p.validate();
    if (exposures.size() != slots.size())
        throw std::invalid_argument("exposures_to_peaks: exposures/slots length mismatch");
    std::vector<double> peaks;
    for (std::size_t k = 0; k < exposures.size(); ++k) {
        if (!(exposures[k] > 0.0))
            throw std::invalid_argument("exposures_to_peaks: exposures must be > 0");
        const double i_shape = slots[k].shape_sq_integral();
        peaks.push_back(std::sqrt(exposures[k] * p.chi * p.delta_r * p.delta_r /
                                  (2.0 * p.n_atoms * p.g_as * p.g_as * i_shape)));
    }
    return peaks;
}

namespace {

std::vector<double> peaks_from_exposures(const std::vector<double>& exposures,
                                         const PhysicalParams& p,
                                         const std::vector<PulseShape>& slots) {
    return exposures_to_peaks(exposures, p, slots);
}

} // namespace

std::vector<double> achieved_bin_fractions(const PhysicalParams& p,
                                           const std::vector<PulseShape>& reads,
                                           const GridSpec& grid) {
    PulseTrain train;
    train.reads = reads;
    // Dummy write well before the reads; retrieval ignores it.
    train.write.duration = reads.front().duration;
    train.write.center = reads.front().center - 20.0 * reads.front().duration;
    const DynamicsTrace tr = integrate_retrieval(p, train, 1.0, grid);

    const std::size_t j = reads.size();
    std::vector<double> bounds(j + 1);
    bounds[0] = tr.grid.front();
    for (std::size_t i = 1; i < j; ++i)
        bounds[i] = 0.5 * (reads[i - 1].center + reads[i].center);
    bounds[j] = tr.grid.back();

    std::vector<double> frac(j);
    for (std::size_t i = 0; i < j; ++i)
        frac[i] = tr.cum_as_at(bounds[i + 1]) - tr.cum_as_at(bounds[i]);
    return frac;
}

RefineResult refine_design(const std::vector<double>& seed_peaks,
                           const PhysicalParams& p, const DesignTarget& target,
                           double rel_tol, int max_iter, double damping) {
    target.validate();
    if (target.slots.empty())
        throw std::invalid_argument("refine_design: target has no shape slots");
    if (seed_peaks.size() != target.slots.size())
        throw std::invalid_argument("refine_design: seed/slots length mismatch");

    const std::size_t j = target.slots.size();
    // Recover exposures from the seed peaks (inverse of exposures_to_peaks).
    std::vector<double> log_b(j);
    for (std::size_t k = 0; k < j; ++k) {
        const double i_shape = target.slots[k].shape_sq_integral();
        const double b = seed_peaks[k] * seed_peaks[k] * 2.0 * p.n_atoms * p.g_as *
                         p.g_as * i_shape / (p.chi * p.delta_r * p.delta_r);
        log_b[k] = std::log(b);
    }

    RefineResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        std::vector<double> b(j);
        for (std::size_t k = 0; k < j; ++k) b[k] = std::exp(log_b[k]);
        std::vector<PulseShape> reads = target.slots;
        const std::vector<double> peaks = peaks_from_exposures(b, p, reads);
        for (std::size_t k = 0; k < j; ++k) reads[k].peak = peaks[k];

        res.achieved = achieved_bin_fractions(p, reads);
        res.peaks = peaks;
        res.exposures = b;
        res.residuals.assign(j, 0.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            res.residuals[k] = res.achieved[k] / target.weights[k] - 1.0;
            worst = std::max(worst, std::abs(res.residuals[k]));
        }
        if (worst < rel_tol) {
            res.converged = true;
            return res;
        }
        for (std::size_t k = 0; k < j; ++k) {
            // Local log-log slope of the lossless bin fraction 1 - e^{-b}
            // with respect to the exposure; near saturation it vanishes, so
            // an unscaled fixed point would crawl.
            const double slope =
                std::max(b[k] * std::exp(-b[k]) / (-std::expm1(-b[k])), 0.02);
            log_b[k] += damping / slope * std::log(target.weights[k] / res.achieved[k]);
            // Retrieval saturates as 1 - e^{-b}; beyond b ~ 50 more exposure
            // changes nothing and only stiffens the integration.
            log_b[k] = std::min(log_b[k], std::log(50.0));
        }
    }
    return res; // converged == false; residuals report the shortfall
}

} // namespace tbsim
