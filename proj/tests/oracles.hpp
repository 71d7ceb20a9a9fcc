#pragma once

// Test-only reference computations. Nothing here calls into the code it
// is used to check beyond plain data types.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// E xi^4 of the unit-variance Student-t by integrating its density.
inline double student_t_fourth_moment(double nu) {
    const double scale = std::sqrt((nu - 2.0) / nu);
    const double c = std::tgamma((nu + 1.0) / 2.0) / (std::sqrt(nu * std::numbers::pi) * std::tgamma(nu / 2.0));
    // xi = scale * T, so E xi^4 = scale^4 * 2 * int_0^inf t^4 f(t) dt
    auto integrand = [&](double t) {
        if (t <= 0.0) return 0.0;
        return c * std::exp(4.0 * std::log(t) - (nu + 1.0) / 2.0 * std::log1p(t * t / nu));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double half = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
    return std::pow(scale, 4) * 2.0 * half;
}

/// E xi^4 of the standardized Pareto(alpha, xm) by integrating its density.
inline double pareto_fourth_moment(double alpha, double xm) {
    const double mean = alpha * xm / (alpha - 1.0);
    const double sd = std::sqrt(xm * xm * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0)));
    auto integrand = [&](double x) {
        const double z = std::abs(x - mean) / sd;
        if (z == 0.0) return 0.0;
        return alpha * std::exp(4.0 * std::log(z) + alpha * std::log(xm) - (alpha + 1.0) * std::log(x));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(integrand, xm, std::numeric_limits<double>::infinity());
}

/// E g(Z) for Z standard normal.
template <typename F>
double normal_expectation(F g) {
    auto integrand = [&](double z) { return g(z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double pos = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
    auto mirrored = [&](double z) { return integrand(-z); };
    const double neg = integrator.integrate(mirrored, 0.0, std::numeric_limits<double>::infinity());
    return pos + neg;
}

/// tau^2 as the autocovariance sum gamma0 + 2 sum_l gamma_l of the squared
/// GARCH(1,1) process, using gamma_l = (a1 + b1)^{l-1} gamma_1.
inline double tau_squared_by_autocovariance(double a0, double a1, double b1, double kappa) {
    const double mu = a0 / (1.0 - a1 - b1);
    const double rho2 = kappa * a1 * a1 + 2.0 * a1 * b1 + b1 * b1;
    const double e_sigma4 = a0 * a0 * (1.0 + a1 + b1) / ((1.0 - a1 - b1) * (1.0 - rho2));
    const double gamma0 = kappa * e_sigma4 - mu * mu;
    const double gamma1 = a0 * mu + (a1 * kappa + b1) * e_sigma4 - mu * mu;
    return gamma0 + 2.0 * gamma1 / (1.0 - a1 - b1);
}

/// Lag-1 autocovariance of X^2 under the same closed form.
inline double lag1_autocovariance(double a0, double a1, double b1, double kappa) {
    const double mu = a0 / (1.0 - a1 - b1);
    const double rho2 = kappa * a1 * a1 + 2.0 * a1 * b1 + b1 * b1;
    const double e_sigma4 = a0 * a0 * (1.0 + a1 + b1) / ((1.0 - a1 - b1) * (1.0 - rho2));
    return a0 * mu + (a1 * kappa + b1) * e_sigma4 - mu * mu;
}

/// T_k recomputed from scratch for every k.
inline std::vector<double> naive_t(const std::vector<double>& x2, double center) {
    std::vector<double> out(x2.size());
    for (std::size_t k = 1; k <= x2.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += x2[i] - center;
        out[k - 1] = s / std::sqrt(static_cast<double>(k));
    }
    return out;
}

/// I_k recomputed from scratch for every k.
inline std::vector<double> naive_i(const std::vector<double>& x2, const std::vector<double>& y, double center,
                                   double p) {
    std::vector<double> out(x2.size());
    for (std::size_t k = 1; k <= x2.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += (x2[i] - center) * y[i];
        out[k - 1] = s * std::pow(static_cast<double>(k), -1.0 / p);
    }
    return out;
}

/// Direct evaluation of the averaged log-average CDF at t.
inline double logavg_cdf_at(const std::vector<std::vector<double>>& seqs, std::size_t k_min, double t) {
    double total = 0.0;
    for (const auto& s : seqs) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = k_min; k <= s.size(); ++k) {
            den += 1.0 / static_cast<double>(k);
            if (s[k - 1] <= t) num += 1.0 / static_cast<double>(k);
        }
        total += num / den;
    }
    return total / static_cast<double>(seqs.size());
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace oracle
