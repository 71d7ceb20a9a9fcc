#include "garchci/resampling.hpp"

#include "garchci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace garchci {

std::vector<double> i_sequence(std::span<const double> x2, std::span<const double> y, double center, double p) {
    if (x2.size() != y.size()) {
        throw LengthMismatch("weights have length " + std::to_string(y.size()) + ", path has " +
                             std::to_string(x2.size()));
    }
    if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("stable order p must satisfy 1 < p < 2");
    std::vector<double> out(x2.size());
    const double inv_p = 1.0 / p;
    double partial = 0.0;
    for (std::size_t i = 0; i < x2.size(); ++i) {
        partial += (x2[i] - center) * y[i];
        out[i] = partial * std::pow(static_cast<double>(i + 1), -inv_p);
    }
    return out;
}

std::vector<double> i_sequence(const SamplePath& path, std::span<const double> y, double center, double p) {
    return i_sequence(std::span<const double>(path.x2), y, center, p);
}

LogAvgCdf build_resample_cdf(std::span<const double> x2, std::span<const double> y, double center, double p,
                             const LogAvgConfig& cfg) {
    if (x2.size() != y.size()) {
        throw LengthMismatch("weights have length " + std::to_string(y.size()) + ", path has " +
                             std::to_string(x2.size()));
    }
    const auto windows = shift_windows(x2.size(), cfg);
    std::vector<std::vector<double>> sequences;
    std::vector<std::size_t> offsets;
    for (const auto& w : windows) {
        sequences.push_back(i_sequence(x2.subspan(w.offset, w.length), y.subspan(w.offset, w.length), center, p));
        offsets.push_back(w.offset);
    }
    return build_logavg_cdf(sequences, offsets, cfg.k_min);
}

ConfidenceInterval resample_ci_with_weights(std::span<const double> x2, std::span<const double> y, double p,
                                            double alpha, const LogAvgConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (x2.empty()) throw std::invalid_argument("empty sample path");
    const double n = static_cast<double>(x2.size());
    const double center = std::accumulate(x2.begin(), x2.end(), 0.0) / n;
    const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

    const LogAvgCdf cdf = build_resample_cdf(x2, y, center, p, cfg);
    const double z_lo = quantile(cdf, alpha / 2.0);
    const double z_hi = quantile(cdf, 1.0 - alpha / 2.0);
    const std::size_t n_eff = inversion_length(x2.size(), cfg);
    const double scale = std::pow(static_cast<double>(n_eff), -(p - 1.0) / p);

    ConfidenceInterval ci;
    ci.method = MethodSpec::stable(p);
    ci.level = 1.0 - alpha;
    ci.center_used = center;
    ci.z_lo = z_lo;
    ci.z_hi = z_hi;
    ci.inversion_n = n_eff;
    ci.y_mean = y_mean;
    ci.lo = (center - z_hi * scale) / y_mean;
    ci.hi = (center - z_lo * scale) / y_mean;
    if (ci.lo > ci.hi) std::swap(ci.lo, ci.hi);
    return ci;
}

ConfidenceInterval resample_ci(const SamplePath& path, double p, double alpha, RngStream& rng,
                               const LogAvgConfig& cfg, const StableGate& gate, ResampleRun* run) {
    // Fail on short paths before consuming any randomness.
    shift_windows(path.size(), cfg);
    const StableSpec spec(p, 1.0, gate.mean_tol);
    StableBatch batch = sample_stable_batch_with_mean_gate(spec, path.size(), rng, gate.max_attempts);
    ConfidenceInterval ci = resample_ci_with_weights(path.x2, batch.values, p, alpha, cfg);
    ci.gate_attempts = batch.attempts;
    if (run != nullptr) {
        run->p = p;
        run->center = ci.center_used;
        run->y_mean = batch.mean;
        run->attempts = batch.attempts;
        run->i_values = i_sequence(path, batch.values, ci.center_used, p);
        run->y = std::move(batch.values);
    }
    return ci;
}

}  // namespace garchci
