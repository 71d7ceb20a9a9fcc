#pragma once

#include "garchci/distributions.hpp"
#include "garchci/garch.hpp"
#include "garchci/interval.hpp"
#include "garchci/logavg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace garchci {

/// I_k = k^{-1/p} sum_{i<=k} (x2_i - center) y_i for k = 1..n.
/// Throws LengthMismatch if the spans differ in length.
std::vector<double> i_sequence(std::span<const double> x2, std::span<const double> y, double center, double p);
std::vector<double> i_sequence(const SamplePath& path, std::span<const double> y, double center, double p);

/// Log-average CDF of the I statistics with the shift protocol of `cfg`.
LogAvgCdf build_resample_cdf(std::span<const double> x2, std::span<const double> y, double center, double p,
                             const LogAvgConfig& cfg);

struct ResampleRun {
    double p = 0.0;
    std::vector<double> y;
    std::vector<double> i_values;
    double center = 0.0;
    double y_mean = 0.0;
    std::size_t attempts = 0;
};

struct StableGate {
    double mean_tol = 0.2;
    std::size_t max_attempts = kDefaultMaxAttempts;
};

/// Interval from fixed weights y (no sampling). Endpoints are
/// (mean - z * n_eff^{-(p-1)/p}) / mean(y) for the two tail quantiles z.
ConfidenceInterval resample_ci_with_weights(std::span<const double> x2, std::span<const double> y, double p,
                                            double alpha, const LogAvgConfig& cfg);

/// Draws one gated stable batch and builds the interval from it. When
/// `run` is non-null it receives the batch and the I sequence.
ConfidenceInterval resample_ci(const SamplePath& path, double p, double alpha, RngStream& rng,
                               const LogAvgConfig& cfg, const StableGate& gate = {}, ResampleRun* run = nullptr);

}  // namespace garchci
