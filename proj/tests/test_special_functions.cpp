#include <doctest.h>

#include "fracrd/errors.hpp"
#include "fracrd/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace fracrd;

namespace {

// exp(x^2) erfc(x); asymptotic expansion where exp(x^2) overflows.
double erfcx(double x) {
    if (x < 25.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 12; ++k) {
        term *= -(2.0 * k - 1.0) / (2.0 * x * x);
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

}  // namespace

TEST_CASE("E_1 is the exponential") {
    CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
    for (int i = 0; i <= 200; ++i) {
        const double z = -30.0 + 0.3 * i;
        CHECK(std::fabs(mittag_leffler(1.0, z) - std::exp(z)) <= 1e-12);
    }
}

TEST_CASE("values at zero") {
    CHECK(mittag_leffler(0.5, 0.0) == 1.0);
    CHECK(mittag_leffler2(0.5, 0.5, 0.0) == doctest::Approx(0.5641895835477563).epsilon(1e-15));
    CHECK(mittag_leffler2(0.3, 2.5, 0.0) == doctest::Approx(1.0 / std::tgamma(2.5)).epsilon(1e-15));
}

TEST_CASE("E_{1/2}(-x) matches erfcx on the negative axis") {
    for (double x : {0.01, 0.5, 1.0, 3.0, 4.4, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0}) {
        // z = -x with E_{1/2}(-x) = erfcx(x)
        CHECK(std::fabs(mittag_leffler(0.5, -x) - erfcx(x)) <= 1e-12);
    }
    const double v = mittag_leffler(0.5, -1.0);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("E_{1/2,1/2}(-x) closed form") {
    for (double x : {0.2, 2.0, 6.0, 12.0, 25.0, 45.0}) {
        const double expected = kInvSqrtPi - x * erfcx(x);
        CHECK(std::fabs(mittag_leffler2(0.5, 0.5, -x) - expected) <= 1e-12);
    }
    const double v = mittag_leffler2(0.5, 0.5, -2.0);
    CHECK(v > 0.0);
    CHECK(v < kInvSqrtPi);
}

TEST_CASE("E_{1,2} closed form") {
    CHECK(mittag_leffler2(1.0, 2.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    for (double z : {-40.0, -10.0, -0.5, 0.5, 10.0}) {
        CHECK(mittag_leffler2(1.0, 2.0, z) == doctest::Approx(std::expm1(z) / z).epsilon(1e-13));
    }
    CHECK(mittag_leffler2(1.0, 3.0, -60.0) ==
          doctest::Approx((std::exp(-60.0) - 1.0 + 60.0) / 3600.0).epsilon(1e-13));
}

TEST_CASE("positive axis: E_{1/2}(x) = exp(x^2) erfc(-x)") {
    for (double x : {0.5, 2.0, 5.0, 19.0, 21.0, 25.0}) {
        const double expected = std::exp(x * x) * std::erfc(-x);
        CHECK(mittag_leffler(0.5, x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("E_{alpha,alpha}(-eta) is decreasing and bounded") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const double cap = 1.0 / std::tgamma(alpha);
        double prev = cap;
        for (int i = 1; i <= 500; ++i) {
            const double eta = 0.1 * i;
            const double v = mittag_leffler2(alpha, alpha, -eta);
            CHECK(v >= 0.0);
            CHECK(v <= cap);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("branches agree where they overlap") {
    MlParams p;
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        for (double beta : {alpha, 1.0, 1.5, 2.0}) {
            p.alpha = alpha;
            p.beta = beta;
            const double z = -p.asymptotic_switch;
            const double integral = mittag_leffler2(p, z, MlBranch::integral);
            const double asym = mittag_leffler2(p, z, MlBranch::asymptotic);
            if (alpha <= 0.7) {
                CHECK(std::fabs(integral - asym) <= 1e-9);
            }
            // Series is well conditioned at small |z|.
            const double zs = -0.8;
            CHECK(std::fabs(mittag_leffler2(p, zs, MlBranch::series) -
                            mittag_leffler2(p, zs, MlBranch::integral)) <= 1e-13);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(mittag_leffler(1.5, 1.0), ParameterError);
    CHECK_THROWS_AS(mittag_leffler2(0.5, -1.0, 1.0), ParameterError);
    MlParams p;
    p.max_terms = 10;
    CHECK_THROWS_AS(mittag_leffler2(p, 1.0), ParameterError);
    CHECK_THROWS_AS(mittag_leffler(0.2, 500.0), ParameterError);
}

TEST_CASE("series budget exhaustion carries the partial sum") {
    MlParams p;
    p.alpha = 0.5;
    p.max_terms = 50;
    try {
        mittag_leffler2(p, 15.0, MlBranch::series);
        FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
        CHECK(e.partial_sum() > 0.0);
        CHECK(e.bound() > 0.0);
    }
}

TEST_CASE("gamma plumbing") {
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_fn(-2.0), ParameterError);
    CHECK(rgamma(-3.0) == 0.0);
    CHECK(rgamma(0.0) == 0.0);
}

TEST_CASE("exponential envelope") {
    CHECK(ml_exponential_envelope(0.5, 1.0, 0.0).value == 1.0);
    CHECK(ml_exponential_envelope(0.5, 4.0, 1.0).value == doctest::Approx(std::exp(16.0)));
    const auto sat = ml_exponential_envelope(0.5, 100.0, 1.0);
    CHECK(sat.saturated);
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) {
        grid.push_back(0.1 * i);
    }
    const double c = fit_envelope_constant(0.5, 1.0, grid);
    CHECK(c >= 1.0);
    CHECK(std::isfinite(c));
    for (double t : grid) {
        const double ratio = mittag_leffler(0.5, std::sqrt(t)) / ml_exponential_envelope(0.5, 1.0, t).value;
        CHECK(ratio <= c * (1 + 1e-14));
    }
}
