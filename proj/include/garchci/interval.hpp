#pragma once

#include <cstddef>
#include <string>

namespace garchci {

/// Variance used by the normal-approximation interval.
enum class TauEstimator {
    KnownMoments,      ///< closed-form tau^2 with the innovation law's exact E xi^4
    ResidualKurtosis,  ///< closed-form tau^2 with E xi^4 estimated from x2 / sigma2
    BatchMeans,        ///< batch-means long-run variance, batch size floor(sqrt(n))
};

enum class MethodKind { NormalApprox, Asclt, StableResample };

struct MethodSpec {
    MethodKind kind = MethodKind::Asclt;
    double p = 2.0;  ///< stable order, StableResample only
    TauEstimator tau = TauEstimator::KnownMoments;

    static MethodSpec normal(TauEstimator tau = TauEstimator::KnownMoments) {
        return {MethodKind::NormalApprox, 2.0, tau};
    }
    static MethodSpec asclt() { return {MethodKind::Asclt, 2.0, TauEstimator::KnownMoments}; }
    static MethodSpec stable(double p) { return {MethodKind::StableResample, p, TauEstimator::KnownMoments}; }

    /// "normal", "normal[residual]", "normal[batch]", "asclt", "stable(1.8)".
    std::string label() const;
    /// Parses the labels above; also accepts "stable:1.8" and "p=2" / "p=1.8".
    static MethodSpec parse(const std::string& text);

    /// Stability order as reported in tables: 2 for the ASCLT method.
    double order() const noexcept { return kind == MethodKind::StableResample ? p : 2.0; }

    friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    MethodSpec method;
    double level = 0.95;
    double center_used = 0.0;

    // Protocol metadata. Fields that do not apply to a method stay zero.
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::size_t inversion_n = 0;
    double tau2 = 0.0;
    double y_mean = 0.0;
    std::size_t gate_attempts = 0;

    double length() const noexcept { return hi - lo; }
    bool contains(double value) const noexcept { return lo <= value && value <= hi; }
};

}  // namespace garchci
