#include "garchci/inference.hpp"

#include "garchci/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace garchci {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

double normal_quantile(double q) {
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), q);
}

}  // namespace

std::string MethodSpec::label() const {
    switch (kind) {
        case MethodKind::NormalApprox:
            switch (tau) {
                case TauEstimator::KnownMoments:
                    return "normal";
                case TauEstimator::ResidualKurtosis:
                    return "normal[residual]";
                case TauEstimator::BatchMeans:
                    return "normal[batch]";
            }
            break;
        case MethodKind::Asclt:
            return "asclt";
        case MethodKind::StableResample: {
            std::ostringstream os;
            os << "stable(" << p << ")";
            return os.str();
        }
    }
    return "?";
}

MethodSpec MethodSpec::parse(const std::string& text) {
    static const std::regex stable_re(R"(^\s*stable\s*(?:\(\s*([0-9.]+)\s*\)|:\s*([0-9.]+))\s*$)");
    static const std::regex order_re(R"(^\s*p\s*=\s*([0-9.]+)\s*$)");
    std::smatch m;
    if (text == "normal" || text == "normal[known]") return normal(TauEstimator::KnownMoments);
    if (text == "normal[residual]") return normal(TauEstimator::ResidualKurtosis);
    if (text == "normal[batch]") return normal(TauEstimator::BatchMeans);
    if (text == "asclt") return asclt();
    if (std::regex_match(text, m, stable_re)) {
        const double p = std::stod(m[1].matched ? m[1].str() : m[2].str());
        if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("stable order must satisfy 1 < p < 2 in '" + text + "'");
        return stable(p);
    }
    if (std::regex_match(text, m, order_re)) {
        const double p = std::stod(m[1].str());
        if (p == 2.0) return asclt();
        if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("stable order must satisfy 1 < p <= 2 in '" + text + "'");
        return stable(p);
    }
    throw std::invalid_argument("unknown method '" + text + "'");
}

double residual_fourth_moment(const SamplePath& path) {
    if (path.sigma2.size() != path.x2.size()) throw LengthMismatch("path needs sigma2 alongside x2");
    if (path.x2.empty()) throw std::invalid_argument("empty sample path");
    double acc = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double xi2 = path.x2[k] / path.sigma2[k];
        acc += xi2 * xi2;
    }
    return acc / static_cast<double>(path.size());
}

double batch_means_tau2(const SamplePath& path) {
    const std::size_t n = path.size();
    const std::size_t b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
    const std::size_t nb = n / b;
    if (nb < 2) throw InsufficientLength("batch-means variance needs at least two batches");
    std::vector<double> means(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        double s = 0.0;
        for (std::size_t i = j * b; i < (j + 1) * b; ++i) s += path.x2[i];
        means[j] = s / static_cast<double>(b);
    }
    double grand = 0.0;
    for (const double m : means) grand += m;
    grand /= static_cast<double>(nb);
    double ss = 0.0;
    for (const double m : means) ss += (m - grand) * (m - grand);
    return static_cast<double>(b) * ss / static_cast<double>(nb - 1);
}

ConfidenceInterval normal_ci_with_tau2(const SamplePath& path, double tau2, double alpha) {
    check_alpha(alpha);
    if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw std::invalid_argument("tau^2 must be finite and >= 0");
    const double m = path.mean();
    const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(tau2 / static_cast<double>(path.size()));
    ConfidenceInterval ci;
    ci.method = MethodSpec::normal();
    ci.level = 1.0 - alpha;
    ci.center_used = m;
    ci.tau2 = tau2;
    ci.inversion_n = path.size();
    ci.lo = m - half;
    ci.hi = m + half;
    return ci;
}

ConfidenceInterval normal_ci(const SamplePath& path, const GarchParams& params, const InnovationSpec& spec,
                             double alpha, TauEstimator estimator) {
    double tau2 = 0.0;
    switch (estimator) {
        case TauEstimator::KnownMoments:
            tau2 = tau_squared(params, spec);
            break;
        case TauEstimator::ResidualKurtosis:
            tau2 = tau_squared(params, residual_fourth_moment(path));
            break;
        case TauEstimator::BatchMeans:
            tau2 = batch_means_tau2(path);
            break;
    }
    ConfidenceInterval ci = normal_ci_with_tau2(path, tau2, alpha);
    ci.method = MethodSpec::normal(estimator);
    return ci;
}

ConfidenceInterval asclt_ci(const SamplePath& path, double alpha, const LogAvgConfig& cfg) {
    check_alpha(alpha);
    const double m = path.mean();
    const LogAvgCdf cdf = build_logavg_cdf(std::span<const double>(path.x2), m, cfg);
    const double lower_q = quantile(cdf, alpha / 2.0);
    const double upper_q = quantile(cdf, 1.0 - alpha / 2.0);
    const std::size_t n_eff = inversion_length(path.size(), cfg);
    const double root = std::sqrt(static_cast<double>(n_eff));

    ConfidenceInterval ci;
    ci.method = MethodSpec::asclt();
    ci.level = 1.0 - alpha;
    ci.center_used = m;
    ci.z_lo = lower_q;
    ci.z_hi = upper_q;
    ci.inversion_n = n_eff;
    ci.lo = m - upper_q / root;
    ci.hi = m - lower_q / root;
    return ci;
}

ConfidenceInterval build_ci(const SamplePath& path, const MethodSpec& method, double alpha, RngStream& rng,
                            const CiContext& ctx) {
    switch (method.kind) {
        case MethodKind::NormalApprox: {
            if (method.tau == TauEstimator::BatchMeans) {
                ConfidenceInterval ci = normal_ci_with_tau2(path, batch_means_tau2(path), alpha);
                ci.method = method;
                return ci;
            }
            if (!ctx.params) throw std::invalid_argument("normal approximation needs the GARCH coefficients");
            if (method.tau == TauEstimator::KnownMoments && !ctx.innovation) {
                throw std::invalid_argument("known-moment normal approximation needs the innovation law");
            }
            return normal_ci(path, *ctx.params, ctx.innovation.value_or(InnovationSpec::normal()), alpha, method.tau);
        }
        case MethodKind::Asclt:
            return asclt_ci(path, alpha, ctx.logavg);
        case MethodKind::StableResample:
            return resample_ci(path, method.p, alpha, rng, ctx.logavg, ctx.gate);
    }
    throw std::invalid_argument("unknown method kind");
}

}  // namespace garchci
