#include <cmath>

#include "doctest.h"
#include "ntkae/quadrature.hpp"

using namespace ntkae;

TEST_CASE("point mass covariance gives sigmoid(0)^2") {
    CHECK(t_operator({0, 0, 0}, 0, 0, Activation::sigmoid()) == doctest::Approx(0.25));
}

TEST_CASE("erf derivative pair at identity covariance") {
    const CovPair id{1, 0, 1};
    const double expected = 4.0 / (3.0 * M_PI);
    CHECK(t_derf_derf(id) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(t_operator(id, 1, 1, Activation::erf()) - expected) < 1e-8);
}

TEST_CASE("erf pair at fully correlated covariance") {
    const CovPair ones{1, 1, 1};
    const double expected = (2.0 / M_PI) * std::asin(2.0 / 3.0);
    CHECK(t_erf_erf(ones) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(t_operator(ones, 0, 0, Activation::erf()) - expected) < 1e-8);
}

TEST_CASE("quadrature reproduces the erf-family closed forms across scales") {
    const Activation ses = Activation::erf_scaled_sigmoid();
    double worst = 0.0;
    for (double qa : {1e-9, 0.04, 1.0, 12.5, 312.5, 1e4}) {
        for (double qb : {1e-9, 0.04, 1.0, 12.5, 312.5, 1e4}) {
            for (double rho : {0.0, 0.5, -0.9, 0.999, -0.999999}) {
                const CovPair c{qa, rho * std::sqrt(qa * qb), qb};
                worst = std::max(worst,
                                 std::abs(t_operator(c, 0, 0, ses) - t_scaled_sigmoid(c)));
                worst = std::max(worst, std::abs(t_operator(c, 1, 1, ses) -
                                                 t_scaled_sigmoid_deriv(c)));
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("doubling the panel order moves nothing beyond 1e-9") {
    const Quadrature coarse(16), fine(32);
    const Activation sig = Activation::sigmoid();
    double worst = 0.0;
    for (double qa : {0.0, 1e-10, 0.1, 1.0, 100.0, 1e4}) {
        for (double qb : {0.0, 0.1, 1e4}) {
            for (double rho : {0.0, -0.5, 1.0 - 1e-9, -(1.0 - 1e-9)}) {
                const CovPair c{qa, rho * std::sqrt(qa * qb), qb};
                for (auto [fo, go] : {std::pair{0, 0}, {1, 1}, {0, 2}, {2, 2}, {1, 3}}) {
                    worst = std::max(worst, std::abs(t_operator(c, fo, go, sig, coarse) -
                                                     t_operator(c, fo, go, sig, fine)));
                }
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("linear activations integrate exactly") {
    const Activation lin = Activation::linear(0.25, 0.5);
    for (double qa : {0.5, 40.0, 2.5e5}) {
        for (double rho : {0.0, -0.8, 0.99}) {
            const CovPair c{qa, rho * qa, qa};
            const double expected = 0.25 * 0.25 * c.q_ab + 0.25;
            CHECK(t_operator(c, 0, 0, lin) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(t_operator(c, 1, 1, lin) == doctest::Approx(0.0625).epsilon(1e-12));
            CHECK(t_operator(c, 0, 2, lin) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("non-PSD covariance is rejected") {
    CHECK_THROWS_AS(t_operator({1.0, 2.0, 1.0}, 0, 0, Activation::sigmoid()),
                    std::invalid_argument);
    CHECK_THROWS_AS(default_quadrature().expect2d({1.0, 1.5, 1.0},
                                                  [](double, double) { return 1.0; }),
                    std::invalid_argument);
}

TEST_CASE("expect1d handles degenerate and moment integrands") {
    const Quadrature& q = default_quadrature();
    CHECK(q.expect1d(0.0, [](double u) { return u + 3.0; }) == doctest::Approx(3.0));
    // Gaussian moments: E[z^2] = var, E[z^4] = 3 var^2
    for (double var : {0.3, 7.0, 900.0}) {
        CHECK(q.expect1d(var, [](double u) { return u * u; }) ==
              doctest::Approx(var).epsilon(1e-12));
        CHECK(q.expect1d(var, [](double u) { return u * u * u * u; }) ==
              doctest::Approx(3.0 * var * var).epsilon(1e-12));
    }
}

TEST_CASE("expectation of odd integrands vanishes") {
    const Quadrature& q = default_quadrature();
    const Activation sig = Activation::sigmoid();
    // sigmoid(u) - 1/2 is odd, so E[sigmoid] = 1/2 for any variance
    for (double var : {0.1, 25.0, 1e4}) {
        CHECK(q.expect1d(var, [&](double u) { return sig.eval(0, u); }) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}
