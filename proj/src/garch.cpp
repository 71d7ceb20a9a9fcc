#include "garchci/garch.hpp"

#include "garchci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace garchci {

GarchParams::GarchParams(double a0, double a1, double b1) : a0_(a0), a1_(a1), b1_(b1) {
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw std::invalid_argument("a0 must be > 0");
    if (!(a1 >= 0.0) || !std::isfinite(a1)) throw std::invalid_argument("a1 must be >= 0");
    if (!(b1 >= 0.0) || !std::isfinite(b1)) throw std::invalid_argument("b1 must be >= 0");
}

double SamplePath::sum() const {
    return std::accumulate(x2.begin(), x2.end(), 0.0);
}

double SamplePath::mean() const {
    if (x2.empty()) throw std::invalid_argument("empty sample path");
    return sum() / static_cast<double>(x2.size());
}

StationarityCheck check_stationarity(const GarchParams& params, const InnovationSpec& spec, std::size_t n_mc,
                                     RngStream& rng) {
    const double a1 = params.a1();
    const double b1 = params.b1();
    if (a1 == 0.0 && b1 == 0.0) {
        throw Degenerate("a1 = b1 = 0: log(a1 xi^2 + b1) is -infinity, stationarity undetermined by this test");
    }
    StationarityCheck out;
    if (a1 == 0.0) {
        out.log_moment_estimate = std::log(b1);
        out.standard_error = 0.0;
        out.is_stationary = out.log_moment_estimate < 0.0;
        return out;
    }
    if (n_mc < 2) throw std::invalid_argument("check_stationarity needs n_mc >= 2");

    std::vector<double> xi(n_mc);
    fill_innovations(spec, rng, xi);
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const double v = std::log(a1 * xi[i] * xi[i] + b1);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    out.log_moment_estimate = mean;
    out.standard_error = std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
    out.is_stationary = std::isfinite(mean) && mean + 3.0 * out.standard_error < 0.0;
    return out;
}

SamplePath simulate(const GarchParams& params, const InnovationSpec& spec, std::size_t n, std::size_t burn_in,
                    RngStream& rng) {
    if (!params.second_moment_stationary()) {
        throw NonStationary("a1+b1 >= 1: no finite stationary second moment");
    }
    if (n == 0) throw std::invalid_argument("path length must be at least 1");

    const std::size_t total = n + burn_in;
    std::vector<double> xi(total);
    fill_innovations(spec, rng, xi);

    SamplePath path;
    path.burn_in = burn_in;
    path.x2.resize(n);
    path.sigma2.resize(n);

    const double a0 = params.a0();
    const double a1 = params.a1();
    const double b1 = params.b1();
    double sigma2 = stationary_mean(params);
    double x2 = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
        if (k > 0) sigma2 = a0 + a1 * x2 + b1 * sigma2;
        x2 = sigma2 * xi[k] * xi[k];
        if (k >= burn_in) {
            path.x2[k - burn_in] = x2;
            path.sigma2[k - burn_in] = sigma2;
        }
    }
    return path;
}

double stationary_mean(const GarchParams& params) {
    if (!params.second_moment_stationary()) throw NonStationary("a1+b1 >= 1: stationary mean is infinite");
    return params.a0() / (1.0 - params.a1() - params.b1());
}

double tau_squared(const GarchParams& params, double fourth_moment) {
    if (!params.second_moment_stationary()) throw NonStationary("a1+b1 >= 1: tau^2 undefined");
    const double a0 = params.a0();
    const double a1 = params.a1();
    const double b1 = params.b1();
    if (!(fourth_moment >= 1.0)) {
        // Jensen: a unit-variance law has E xi^4 >= 1.
        std::ostringstream os;
        os << "E xi^4 = " << fourth_moment << " < 1 is not the fourth moment of a unit-variance law";
        throw MomentCondition(os.str());
    }
    const double rho2 = params.rho_squared(fourth_moment);
    if (!(rho2 < 1.0)) {
        std::ostringstream os;
        os << "rho^2 = " << rho2 << " >= 1: fourth moment of X^2 is infinite, tau^2 plug-in unusable";
        throw MomentCondition(os.str());
    }
    const double persistence = 1.0 - a1 - b1;
    return a0 * a0 * (1.0 + a1 + b1) / (persistence * persistence) *
           ((fourth_moment * (1.0 + a1 - b1) + 2.0 * b1) / (1.0 - rho2) - 1.0 / persistence);
}

double tau_squared(const GarchParams& params, const InnovationSpec& spec) {
    return tau_squared(params, fourth_moment(spec));
}

std::vector<double> association_sanity(const SamplePath& path, std::span<const std::size_t> lags) {
    const std::size_t n = path.size();
    const double m = path.mean();
    std::vector<double> out;
    out.reserve(lags.size());
    for (const std::size_t lag : lags) {
        if (lag >= n) throw std::invalid_argument("lag " + std::to_string(lag) + " exceeds path length");
        double acc = 0.0;
        for (std::size_t k = 0; k + lag < n; ++k) {
            acc += (path.x2[k] - m) * (path.x2[k + lag] - m);
        }
        out.push_back(acc / static_cast<double>(n - lag));
    }
    return out;
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
    out << "k,x2,sigma2\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < path.size(); ++k) {
        out << (k + 1) << ',' << path.x2[k] << ',' << path.sigma2[k] << '\n';
    }
}

SamplePath read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("path CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "k,x2,sigma2") throw std::invalid_argument("path CSV header must be 'k,x2,sigma2', got '" + line + "'");

    SamplePath path;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::istringstream fields(line);
        std::string k, x2, sigma2;
        if (!std::getline(fields, k, ',') || !std::getline(fields, x2, ',') || !std::getline(fields, sigma2)) {
            throw std::invalid_argument("malformed path CSV row " + std::to_string(row));
        }
        try {
            path.x2.push_back(std::stod(x2));
            path.sigma2.push_back(std::stod(sigma2));
        } catch (const std::exception&) {
            throw std::invalid_argument("non-numeric value in path CSV row " + std::to_string(row));
        }
        if (path.x2.back() < 0.0 || !(path.sigma2.back() > 0.0)) {
            throw std::invalid_argument("path CSV row " + std::to_string(row) + " needs x2 >= 0 and sigma2 > 0");
        }
    }
    if (path.x2.empty()) throw std::invalid_argument("path CSV has no rows");
    return path;
}

}  // namespace garchci
