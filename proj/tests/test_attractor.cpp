#include <cmath>

#include "doctest.h"
#include "ntkae/attractor.hpp"

using namespace ntkae;

TEST_CASE("constant map converges at the first application") {
    Eigen::VectorXd c(2);
    c << 1.0, -2.0;
    const VectorMap map = [&](const Eigen::VectorXd&) { return c; };
    const IterationTrace tr = iterate(map, Eigen::VectorXd::Zero(2), c);
    CHECK(tr.converged);
    CHECK(tr.iterations_used == 1);
    CHECK(tr.states.size() == 2);
    CHECK(tr.final_mse == doctest::Approx(0.0));
}

TEST_CASE("identity map never converges from a distant start") {
    const VectorMap map = [](const Eigen::VectorXd& x) { return x; };
    Eigen::VectorXd x0 = Eigen::VectorXd::Ones(3);
    const IterationTrace tr = iterate(map, x0, Eigen::VectorXd::Zero(3), 50, 1e-2);
    CHECK(!tr.converged);
    CHECK(tr.iterations_used == 50);
    CHECK(tr.states.size() == 51);
}

TEST_CASE("halving map needs the exact geometric iteration count") {
    const VectorMap map = [](const Eigen::VectorXd& x) { return (0.5 * x).eval(); };
    for (int n0 : {1, 4, 16}) {
        Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n0) / std::sqrt(double(n0));
        const double tol = 1e-2;
        const IterationTrace tr = iterate(map, x0, Eigen::VectorXd::Zero(n0), 50, tol);
        const int expected =
            static_cast<int>(std::ceil(std::log2(1.0 / std::sqrt(n0 * tol))));
        CHECK(tr.converged);
        CHECK(tr.iterations_used == expected);
    }
}

TEST_CASE("attractor test compares the spectral radius against the margin") {
    SpectrumReport rep;
    rep.largest_norm = 0.5;
    CHECK(is_attractor(rep));
    rep.largest_norm = 1.0;
    CHECK(!is_attractor(rep));
    rep.largest_norm = 1.0 - 1e-7;
    CHECK(is_attractor(rep, 0.0));
    CHECK(!is_attractor(rep, 1e-6));
    CHECK_THROWS_AS(is_attractor(rep, -0.1), std::invalid_argument);
}

TEST_CASE("non-finite states raise a divergence error with the step index") {
    const VectorMap blowup = [](const Eigen::VectorXd& x) { return (1e200 * x).eval(); };
    Eigen::VectorXd x0 = Eigen::VectorXd::Ones(2);
    try {
        iterate(blowup, x0, Eigen::VectorXd::Zero(2), 50, 1e-2);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration >= 1);
        CHECK(e.iteration <= 3);
    }
}

namespace {

// 1-D map with basin of attraction exactly (-a, a) around the fixed point 0
VectorMap gated_halving(double a) {
    return [a](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = x;
        if (std::abs(x(0)) < a) {
            y(0) = 0.5 * x(0);
        } else {
            y(0) = x(0) + (x(0) > 0 ? a : -a);
        }
        return y;
    };
}

}  // namespace

TEST_CASE("zero noise recovers every fixed point") {
    Eigen::MatrixXd pts(3, 2);
    pts << 1, -1, 2, 0, 0, 3;
    const VectorMap map = [](const Eigen::VectorXd& x) { return x; };
    const BasinReport rep = basin_probe(map, pts, 0.0, 25, 123);
    CHECK(rep.success_rate == 1.0);
    for (double r : rep.per_point_rate) CHECK(r == 1.0);
}

TEST_CASE("empirical basin mass matches the Gaussian closed form") {
    const double a = 3.0, sigma = 2.0;
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 1);
    const int samples = 400;
    const BasinReport rep = basin_probe(gated_halving(a), pts, sigma, samples, 77);
    const double p = std::erf(a / (sigma * std::sqrt(2.0)));
    const double se = std::sqrt(p * (1.0 - p) / samples);
    CHECK(std::abs(rep.success_rate - p) <= 3.0 * se);
}

TEST_CASE("basin reports are bit-reproducible and seed-sensitive") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 1);
    const BasinReport a = basin_probe(gated_halving(2.0), pts, 1.5, 200, 9);
    const BasinReport b = basin_probe(gated_halving(2.0), pts, 1.5, 200, 9);
    const BasinReport c = basin_probe(gated_halving(2.0), pts, 1.5, 200, 10);
    CHECK(a.success_rate == b.success_rate);
    CHECK(a.per_point_success == b.per_point_success);
    CHECK(a.success_rate != c.success_rate);  // distinct streams at these sizes
}

TEST_CASE("success rate decays with the noise radius up to sampling slack") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 1);
    const double a = 2.5;
    const int samples = 300;
    double prev = 1.0;
    for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
        const BasinReport rep = basin_probe(gated_halving(a), pts, sigma, samples, 31);
        const double se =
            std::sqrt(std::max(rep.success_rate * (1 - rep.success_rate), 0.25 / samples) /
                      samples);
        CHECK(rep.success_rate <= prev + 3.0 * se);
        prev = rep.success_rate;
    }
}

TEST_CASE("divergent draws count as failures rather than raising") {
    // diverges for |x| >= 1, converges inside
    const VectorMap map = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = x;
        y(0) = std::abs(x(0)) < 1.0 ? 0.5 * x(0) : x(0) * 1e160;
        return y;
    };
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 1);
    const BasinReport rep = basin_probe(map, pts, 2.0, 100, 5);
    CHECK(rep.success_rate > 0.0);
    CHECK(rep.success_rate < 1.0);
}
