#include "doctest.h"
#include "oracles.hpp"

#include "garchci/errors.hpp"
#include "garchci/garch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

using namespace garchci;

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(GarchParams(0.0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(GarchParams(0.1, -0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(GarchParams(0.1, 0.1, -0.1), std::invalid_argument);
    CHECK(GarchParams(0.1, 0.1, 0.1).second_moment_stationary());
    CHECK_FALSE(GarchParams(0.1, 0.6, 0.5).second_moment_stationary());
}

TEST_CASE("stationary mean") {
    CHECK(stationary_mean(GarchParams(0.1, 0.1, 0.1)) == doctest::Approx(0.125));
    CHECK(stationary_mean(GarchParams(1, 0, 0)) == 1.0);
    CHECK(stationary_mean(GarchParams(0.5, 0.2, 0.3)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(stationary_mean(GarchParams(0.1, 0.6, 0.5)), NonStationary);
}

TEST_CASE("tau squared") {
    const GarchParams table(0.1, 0.1, 0.1);

    // Frozen fixtures; cross-validated against n Var(mean) in the acceptance suite.
    CHECK(tau_squared(table, InnovationSpec::normal()) == doctest::Approx(0.04039228723404257).epsilon(1e-12));
    CHECK(tau_squared(table, InnovationSpec::student_t(6)) == doctest::Approx(0.10430975274725278).epsilon(1e-12));

    SUBCASE("agrees with the autocovariance-sum route") {
        for (const auto& spec : {InnovationSpec::normal(), InnovationSpec::student_t(8), InnovationSpec::student_t(6),
                                 InnovationSpec::pareto(8, 1), InnovationSpec::pareto(6, 1)}) {
            for (const auto& params : {table, GarchParams(0.5, 0.2, 0.3), GarchParams(1.0, 0.05, 0.9)}) {
                const double k = fourth_moment(spec);
                if (params.rho_squared(k) >= 1.0) continue;
                CAPTURE(spec.label());
                CHECK(tau_squared(params, spec) ==
                      doctest::Approx(oracle::tau_squared_by_autocovariance(params.a0(), params.a1(), params.b1(), k))
                          .epsilon(1e-10));
            }
        }
    }
    SUBCASE("i.i.d. case reduces to the variance of a0 xi^2") {
        const GarchParams iid(2.0, 0.0, 0.0);
        CHECK(tau_squared(iid, InnovationSpec::normal()) == doctest::Approx(4.0 * 2.0));
        CHECK(tau_squared(iid, InnovationSpec::student_t(6)) == doctest::Approx(4.0 * 5.0));
    }
    SUBCASE("moment condition") {
        CHECK_THROWS_AS(tau_squared(GarchParams(0.1, 0.5, 0.1), InnovationSpec::student_t(6)), MomentCondition);
        CHECK_THROWS_AS(tau_squared(table, 0.5), MomentCondition);
        CHECK_THROWS_AS(tau_squared(GarchParams(0.1, 0.6, 0.5), 3.0), NonStationary);
    }
}

TEST_CASE("stationarity check") {
    SUBCASE("table parameters are stationary") {
        RngStream rng(1, 0);
        const auto res = check_stationarity(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 200'000, rng);
        const double exact = oracle::normal_expectation([](double z) { return std::log(0.1 * z * z + 0.1); });
        CHECK(exact < 0.0);
        CHECK(std::abs(res.log_moment_estimate - exact) < 4.0 * res.standard_error);
        CHECK(res.is_stationary);
    }
    SUBCASE("no ARCH term is deterministic") {
        RngStream rng(1, 1);
        const auto res = check_stationarity(GarchParams(0.1, 0.0, 0.5), InnovationSpec::normal(), 10, rng);
        CHECK(res.log_moment_estimate == std::log(0.5));
        CHECK(res.standard_error == 0.0);
        CHECK(res.is_stationary);
    }
    SUBCASE("explosive parameters") {
        RngStream rng(1, 2);
        const auto res = check_stationarity(GarchParams(0.1, 2.0, 1.0), InnovationSpec::normal(), 200'000, rng);
        const double exact = oracle::normal_expectation([](double z) { return std::log(2.0 * z * z + 1.0); });
        CHECK(exact > 0.0);
        CHECK(std::abs(res.log_moment_estimate - exact) < 4.0 * res.standard_error);
        CHECK_FALSE(res.is_stationary);
    }
    SUBCASE("degenerate") {
        RngStream rng(1, 3);
        CHECK_THROWS_AS(check_stationarity(GarchParams(0.1, 0.0, 0.0), InnovationSpec::normal(), 10, rng),
                        Degenerate);
    }
}

TEST_CASE("simulated paths respect the recursion bounds") {
    for (const auto& spec : {InnovationSpec::normal(), InnovationSpec::student_t(6), InnovationSpec::pareto(6, 1)}) {
        for (const auto& params : {GarchParams(0.1, 0.1, 0.1), GarchParams(0.3, 0.4, 0.5)}) {
            RngStream rng(3, 0);
            const auto path = simulate(params, spec, 5000, 100, rng);
            REQUIRE(path.size() == 5000);
            CHECK(*std::min_element(path.sigma2.begin(), path.sigma2.end()) >= params.a0());
            CHECK(*std::min_element(path.x2.begin(), path.x2.end()) >= 0.0);
            for (std::size_t k = 1; k < path.size(); ++k) {
                REQUIRE(path.sigma2[k] ==
                        doctest::Approx(params.a0() + params.a1() * path.x2[k - 1] + params.b1() * path.sigma2[k - 1]));
            }
        }
    }
}

TEST_CASE("simulation details") {
    SUBCASE("starts from the unconditional variance without burn-in") {
        RngStream rng(4, 0);
        const auto path = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 10, 0, rng);
        CHECK(path.sigma2[0] == 0.125);
    }
    SUBCASE("burn-in drops the prefix of the same trajectory") {
        RngStream a(4, 1);
        RngStream b(4, 1);
        const auto full = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 50, 0, a);
        const auto tail = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 30, 20, b);
        CHECK(std::equal(tail.x2.begin(), tail.x2.end(), full.x2.begin() + 20));
        CHECK(tail.burn_in == 20);
    }
    SUBCASE("determinism") {
        RngStream a(4, 2);
        RngStream b(4, 2);
        const auto pa = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::student_t(8), 200, 50, a);
        const auto pb = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::student_t(8), 200, 50, b);
        CHECK(pa.x2 == pb.x2);
        CHECK(pa.sigma2 == pb.sigma2);
    }
    SUBCASE("errors") {
        RngStream rng(4, 3);
        CHECK_THROWS_AS(simulate(GarchParams(0.1, 0.6, 0.5), InnovationSpec::normal(), 10, 0, rng), NonStationary);
        CHECK_THROWS_AS(simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 0, 0, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("long-run means") {
    SUBCASE("degenerate recursion is i.i.d. xi^2") {
        constexpr std::size_t n = 200'000;
        RngStream rng(5, 0);
        const auto path = simulate(GarchParams(1.0, 0.0, 0.0), InnovationSpec::normal(), n, 0, rng);
        CHECK(std::abs(path.mean() - 1.0) < 4.0 * std::sqrt(2.0 / n));
        CHECK(std::all_of(path.sigma2.begin(), path.sigma2.end(), [](double s) { return s == 1.0; }));
    }
    SUBCASE("ergodic mean at the table parameters") {
        constexpr std::size_t n = 1'000'000;
        const GarchParams params(0.1, 0.1, 0.1);
        RngStream rng(5, 1);
        const auto path = simulate(params, InnovationSpec::normal(), n, 500, rng);
        const double se = std::sqrt(tau_squared(params, InnovationSpec::normal()) / n);
        CHECK(std::abs(path.mean() - 0.125) < 4.0 * se);
    }
}

TEST_CASE("association of the squared process") {
    const std::vector<std::size_t> lags = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    SUBCASE("lag 0 is a variance") {
        RngStream rng(6, 0);
        const auto path = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 1000, 100, rng);
        const std::vector<std::size_t> zero = {0};
        CHECK(association_sanity(path, zero)[0] >= 0.0);
    }

    // 20 independent paths give a replication standard error per lag.
    auto replicate = [&](const GarchParams& params) {
        std::vector<std::vector<double>> per_lag(lags.size());
        for (std::uint64_t r = 0; r < 20; ++r) {
            RngStream rng(6, 100 + r);
            const auto path = simulate(params, InnovationSpec::normal(), 50'000, 500, rng);
            const auto cov = association_sanity(path, lags);
            for (std::size_t j = 0; j < lags.size(); ++j) per_lag[j].push_back(cov[j]);
        }
        return per_lag;
    };

    SUBCASE("GARCH lags are nonnegative and lag 1 matches its closed form") {
        const auto per_lag = replicate(GarchParams(0.1, 0.1, 0.1));
        for (std::size_t j = 0; j < lags.size(); ++j) {
            const double se = sd_of(per_lag[j]) / std::sqrt(20.0);
            CAPTURE(lags[j]);
            CHECK(mean_of(per_lag[j]) >= -4.0 * se);
        }
        const double se1 = sd_of(per_lag[1]) / std::sqrt(20.0);
        CHECK(mean_of(per_lag[1]) > 0.0);
        CHECK(std::abs(mean_of(per_lag[1]) - oracle::lag1_autocovariance(0.1, 0.1, 0.1, 3.0)) < 4.0 * se1);
    }
    SUBCASE("i.i.d. case has no lag-1 covariance") {
        const auto per_lag = replicate(GarchParams(0.1, 0.0, 0.0));
        const double se1 = sd_of(per_lag[1]) / std::sqrt(20.0);
        CHECK(std::abs(mean_of(per_lag[1])) < 4.0 * se1);
    }
    SUBCASE("lag beyond the path") {
        RngStream rng(6, 1);
        const auto path = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::normal(), 5, 0, rng);
        const std::vector<std::size_t> far = {5};
        CHECK_THROWS_AS(association_sanity(path, far), std::invalid_argument);
    }
}

TEST_CASE("path CSV") {
    RngStream rng(8, 0);
    const auto path = simulate(GarchParams(0.1, 0.1, 0.1), InnovationSpec::pareto(6, 1), 25, 10, rng);
    std::stringstream buf;
    write_path_csv(buf, path);
    CHECK(buf.str().rfind("k,x2,sigma2\n1,", 0) == 0);
    const auto back = read_path_csv(buf);
    CHECK(back.x2 == path.x2);
    CHECK(back.sigma2 == path.sigma2);

    std::istringstream bad_header("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_path_csv(bad_header), std::invalid_argument);
    std::istringstream negative("k,x2,sigma2\n1,-1,2\n");
    CHECK_THROWS_AS(read_path_csv(negative), std::invalid_argument);
}
