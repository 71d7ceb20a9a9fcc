#include "garchci/distributions.hpp"

#include "garchci/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace garchci {

namespace {

struct ParetoMoments {
    double mean;
    double sd;
};

ParetoMoments pareto_moments(double alpha, double xm) {
    const double mean = alpha * xm / (alpha - 1.0);
    const double var = xm * xm * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0));
    return {mean, std::sqrt(var)};
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

InnovationSpec InnovationSpec::normal() {
    return InnovationSpec{};
}

InnovationSpec InnovationSpec::student_t(double nu) {
    if (!(nu > 4.0) || !std::isfinite(nu)) {
        throw std::invalid_argument("Student-t innovations need nu > 4 for a finite fourth moment, got " +
                                    format_number(nu));
    }
    InnovationSpec s;
    s.family_ = InnovationFamily::StudentT;
    s.nu_ = nu;
    return s;
}

InnovationSpec InnovationSpec::pareto(double alpha, double xm) {
    if (!(alpha > 4.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("Pareto innovations need alpha > 4 for a finite fourth moment, got " +
                                    format_number(alpha));
    }
    if (!(xm > 0.0) || !std::isfinite(xm)) {
        throw std::invalid_argument("Pareto scale xm must be positive, got " + format_number(xm));
    }
    InnovationSpec s;
    s.family_ = InnovationFamily::Pareto;
    s.alpha_ = alpha;
    s.xm_ = xm;
    return s;
}

InnovationSpec InnovationSpec::parse(const std::string& text) {
    static const std::regex normal_re(R"(^\s*(N|n|normal|Normal|N\(0,1\))\s*$)");
    static const std::regex t_re(R"(^\s*(?:t|student|student_t)[:_]?\s*([0-9.eE+-]+)\s*$)");
    static const std::regex pareto_paren_re(R"(^\s*P\(\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*\)\s*$)");
    static const std::regex pareto_colon_re(R"(^\s*pareto:([0-9.eE+-]+)(?::([0-9.eE+-]+))?\s*$)");

    std::smatch m;
    if (std::regex_match(text, normal_re)) {
        return normal();
    }
    if (std::regex_match(text, m, t_re)) {
        return student_t(std::stod(m[1].str()));
    }
    if (std::regex_match(text, m, pareto_paren_re)) {
        return pareto(std::stod(m[1].str()), std::stod(m[2].str()));
    }
    if (std::regex_match(text, m, pareto_colon_re)) {
        return pareto(std::stod(m[1].str()), m[2].matched ? std::stod(m[2].str()) : 1.0);
    }
    throw std::invalid_argument("unrecognized innovation law '" + text +
                                "' (expected N, t<nu>, P(<alpha>,<xm>) or pareto:<alpha>:<xm>)");
}

std::string InnovationSpec::label() const {
    switch (family_) {
        case InnovationFamily::Normal:
            return "N";
        case InnovationFamily::StudentT:
            return "t" + format_number(nu_);
        case InnovationFamily::Pareto:
            return "P(" + format_number(alpha_) + "," + format_number(xm_) + ")";
    }
    return "?";
}

void fill_innovations(const InnovationSpec& spec, RngStream& rng, std::span<double> out) {
    switch (spec.family()) {
        case InnovationFamily::Normal: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (double& v : out) v = dist(rng.engine());
            return;
        }
        case InnovationFamily::StudentT: {
            const double nu = spec.nu();
            const double scale = std::sqrt((nu - 2.0) / nu);
            std::student_t_distribution<double> dist(nu);
            for (double& v : out) v = dist(rng.engine()) * scale;
            return;
        }
        case InnovationFamily::Pareto: {
            const double alpha = spec.alpha();
            const double xm = spec.xm();
            const auto [mean, sd] = pareto_moments(alpha, xm);
            for (double& v : out) {
                // Inverse transform on U in (0, 1).
                const double draw = xm * std::pow(rng.uniform_open(), -1.0 / alpha);
                v = (draw - mean) / sd;
            }
            return;
        }
    }
}

double sample_innovation(const InnovationSpec& spec, RngStream& rng) {
    double v = 0.0;
    fill_innovations(spec, rng, std::span<double>(&v, 1));
    return v;
}

double fourth_moment(const InnovationSpec& spec) {
    switch (spec.family()) {
        case InnovationFamily::Normal:
            return 3.0;
        case InnovationFamily::StudentT: {
            const double nu = spec.nu();
            return 3.0 * (nu - 2.0) / (nu - 4.0);
        }
        case InnovationFamily::Pareto: {
            // Standardized fourth moment = 3 + excess kurtosis; independent of xm.
            const double a = spec.alpha();
            const double excess = 6.0 * (a * a * a + a * a - 6.0 * a - 2.0) / (a * (a - 3.0) * (a - 4.0));
            return 3.0 + excess;
        }
    }
    return 0.0;
}

StableSpec::StableSpec(double p_, double shift_, double mean_tol_) : p(p_), shift(shift_), mean_tol(mean_tol_) {
    if (!(p > 1.0 && p < 2.0)) {
        throw std::invalid_argument("stable order p must satisfy 1 < p < 2, got " + format_number(p));
    }
    if (shift != 0.0 && shift != 1.0) {
        throw std::invalid_argument("stable shift must be 0 or 1, got " + format_number(shift));
    }
    if (!(mean_tol > 0.0)) {
        throw std::invalid_argument("stable mean tolerance must be positive");
    }
}

double sample_stable(const StableSpec& spec, RngStream& rng) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double p = spec.p;
    const double u = half_pi * (2.0 * rng.uniform_open() - 1.0);
    const double w = -std::log(rng.uniform_open());
    const double x = std::sin(p * u) / std::pow(std::cos(u), 1.0 / p) *
                     std::pow(std::cos((1.0 - p) * u) / w, (1.0 - p) / p);
    return spec.shift + x;
}

StableBatch sample_stable_batch_with_mean_gate(const StableSpec& spec, std::size_t n, RngStream& rng,
                                               std::size_t max_attempts) {
    if (n == 0) throw std::invalid_argument("stable batch size must be at least 1");
    if (max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");
    if (spec.shift != 1.0) throw std::invalid_argument("mean gate requires a stable law shifted to mean 1");

    StableBatch batch;
    batch.values.resize(n);
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        double sum = 0.0;
        for (double& y : batch.values) {
            y = sample_stable(spec, rng);
            sum += y;
        }
        batch.mean = sum / static_cast<double>(n);
        batch.attempts = attempt;
        if (std::abs(1.0 - batch.mean) < spec.mean_tol) return batch;
    }
    throw AttemptsExhausted("no stable batch of size " + std::to_string(n) + " at p=" + format_number(spec.p) +
                            " passed the mean gate in " + std::to_string(max_attempts) + " attempts");
}

}  // namespace garchci
