#pragma once

#include "garchci/rng.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace garchci {

enum class InnovationFamily { Normal, StudentT, Pareto };

/// A standardized innovation law (mean 0, variance 1) with finite fourth moment.
class InnovationSpec {
public:
    static InnovationSpec normal();
    /// Student-t with nu > 4 degrees of freedom, rescaled to unit variance.
    static InnovationSpec student_t(double nu);
    /// Pareto(alpha, xm) centered and rescaled; requires alpha > 4 and xm > 0.
    static InnovationSpec pareto(double alpha, double xm = 1.0);

    /// Accepts "N", "normal", "t8", "t:8", "P(6,1)", "pareto:6:1".
    static InnovationSpec parse(const std::string& text);

    InnovationFamily family() const noexcept { return family_; }
    double nu() const noexcept { return nu_; }
    double alpha() const noexcept { return alpha_; }
    double xm() const noexcept { return xm_; }

    /// Short label used in reports: N, t8, P(6,1).
    std::string label() const;

    friend bool operator==(const InnovationSpec&, const InnovationSpec&) = default;

private:
    InnovationSpec() = default;

    InnovationFamily family_ = InnovationFamily::Normal;
    double nu_ = 0.0;
    double alpha_ = 0.0;
    double xm_ = 0.0;
};

double sample_innovation(const InnovationSpec& spec, RngStream& rng);

/// Fills `out` with i.i.d. draws; equivalent to repeated sample_innovation
/// but reuses the underlying distribution objects.
void fill_innovations(const InnovationSpec& spec, RngStream& rng, std::span<double> out);

/// Exact E xi^4 of the standardized law.
double fourth_moment(const InnovationSpec& spec);

/// Symmetric p-stable law with characteristic function exp(i*shift*t - |t|^p).
struct StableSpec {
    double p = 1.5;
    double shift = 1.0;
    double mean_tol = 0.2;

    StableSpec() = default;
    StableSpec(double p_, double shift_, double mean_tol_ = 0.2);
};

double sample_stable(const StableSpec& spec, RngStream& rng);

struct StableBatch {
    std::vector<double> values;
    double mean = 0.0;
    std::size_t attempts = 0;
};

inline constexpr std::size_t kDefaultMaxAttempts = 1000;

/// Redraws batches of n stable variates until |1 - mean| < spec.mean_tol.
/// Throws AttemptsExhausted after max_attempts rejected batches.
StableBatch sample_stable_batch_with_mean_gate(const StableSpec& spec, std::size_t n, RngStream& rng,
                                               std::size_t max_attempts = kDefaultMaxAttempts);

}  // namespace garchci
