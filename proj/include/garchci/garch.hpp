#pragma once

#include "garchci/distributions.hpp"
#include "garchci/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace garchci {

/// Coefficients of sigma_k^2 = a0 + a1 X_{k-1}^2 + b1 sigma_{k-1}^2.
class GarchParams {
public:
    /// Throws std::invalid_argument unless a0 > 0, a1 >= 0, b1 >= 0.
    GarchParams(double a0, double a1, double b1);

    double a0() const noexcept { return a0_; }
    double a1() const noexcept { return a1_; }
    double b1() const noexcept { return b1_; }

    /// a1 + b1 < 1: the stationary law has a finite second moment.
    bool second_moment_stationary() const noexcept { return a1_ + b1_ < 1.0; }

    /// rho^2 = E[(a1 xi^2 + b1)^2]; the squared process has a finite
    /// fourth moment iff rho^2 < 1.
    double rho_squared(double fourth_moment) const noexcept {
        return a1_ * a1_ * fourth_moment + 2.0 * a1_ * b1_ + b1_ * b1_;
    }

    friend bool operator==(const GarchParams&, const GarchParams&) = default;

private:
    double a0_;
    double a1_;
    double b1_;
};

struct SamplePath {
    std::vector<double> x2;
    std::vector<double> sigma2;
    std::size_t burn_in = 0;

    std::size_t size() const noexcept { return x2.size(); }
    double mean() const;
    double sum() const;
};

struct StationarityCheck {
    double log_moment_estimate = 0.0;
    double standard_error = 0.0;
    bool is_stationary = false;
};

/// Monte Carlo estimate of E log(a1 xi^2 + b1); stationary when the
/// estimate plus three standard errors is negative. Throws Degenerate when
/// a1 = b1 = 0.
StationarityCheck check_stationarity(const GarchParams& params, const InnovationSpec& spec, std::size_t n_mc,
                                     RngStream& rng);

inline constexpr std::size_t kDefaultBurnIn = 500;

/// Starts from the unconditional variance, discards burn_in steps and
/// returns the next n. Throws NonStationary if a1 + b1 >= 1.
SamplePath simulate(const GarchParams& params, const InnovationSpec& spec, std::size_t n, std::size_t burn_in,
                    RngStream& rng);

/// mu = E X^2 = a0 / (1 - a1 - b1).
double stationary_mean(const GarchParams& params);

/// Asymptotic variance of n^{-1/2} sum (X_k^2 - mu) given E xi^4.
/// Throws NonStationary if a1 + b1 >= 1 and MomentCondition if rho^2 >= 1
/// or the fourth moment is below 1.
double tau_squared(const GarchParams& params, double fourth_moment);
double tau_squared(const GarchParams& params, const InnovationSpec& spec);

/// Empirical Cov(X_k^2, X_{k+lag}^2) for each lag.
std::vector<double> association_sanity(const SamplePath& path, std::span<const std::size_t> lags);

/// CSV with header `k,x2,sigma2`, k counted from 1.
void write_path_csv(std::ostream& out, const SamplePath& path);
SamplePath read_path_csv(std::istream& in);

}  // namespace garchci
