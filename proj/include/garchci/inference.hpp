#pragma once

#include "garchci/distributions.hpp"
#include "garchci/garch.hpp"
#include "garchci/interval.hpp"
#include "garchci/logavg.hpp"
#include "garchci/resampling.hpp"

#include <optional>

namespace garchci {

/// m +/- z_{1-alpha/2} sqrt(tau^2 / n) with m the sample mean of x2.
/// KnownMoments needs `spec`; the other estimators only use the path.
ConfidenceInterval normal_ci(const SamplePath& path, const GarchParams& params, const InnovationSpec& spec,
                             double alpha, TauEstimator estimator = TauEstimator::KnownMoments);

/// Normal interval with a caller-supplied tau^2.
ConfidenceInterval normal_ci_with_tau2(const SamplePath& path, double tau2, double alpha);

/// Fourth moment of the standardized residuals x2 / sigma2.
double residual_fourth_moment(const SamplePath& path);

/// Batch-means estimate of the long-run variance of x2 (batch size floor(sqrt(n))).
double batch_means_tau2(const SamplePath& path);

/// Interval from the log-average CDF of T_k centered at the sample mean:
/// [m - U / sqrt(n_eff), m - L / sqrt(n_eff)] with L, U its alpha/2 and
/// 1 - alpha/2 quantiles.
ConfidenceInterval asclt_ci(const SamplePath& path, double alpha, const LogAvgConfig& cfg);

/// Everything a method may need beyond the path itself.
struct CiContext {
    std::optional<GarchParams> params;
    std::optional<InnovationSpec> innovation;
    LogAvgConfig logavg;
    StableGate gate;
};

/// Dispatches on method.kind. `rng` is consumed only by StableResample.
ConfidenceInterval build_ci(const SamplePath& path, const MethodSpec& method, double alpha, RngStream& rng,
                            const CiContext& ctx);

}  // namespace garchci
