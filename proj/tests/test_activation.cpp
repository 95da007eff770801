#include "doctest.h"
#include "ntkae/activation.hpp"
#include "ntkae/rng.hpp"

using namespace ntkae;

TEST_CASE("sigmoid values and slope") {
    Activation s = Activation::sigmoid();
    CHECK(s.eval(0, 0.0) == doctest::Approx(0.5));
    CHECK(s.eval(1, 0.0) == doctest::Approx(0.25));
    CHECK(s.eval(1, 30.0) > 0.0);
    CHECK(s.eval(1, 30.0) <= 0.25);
    CHECK(s.eval(1, -30.0) > 0.0);
}

TEST_CASE("linear activation has vanishing curvature") {
    Activation lin = Activation::linear(0.25, 0.5);
    CHECK(lin.eval(2, 3.7) == 0.0);
    CHECK(lin.eval(3, -1.0) == 0.0);
    CHECK(lin.eval(0, 2.0) == doctest::Approx(1.0));
    CHECK(lin.eval(1, 100.0) == doctest::Approx(0.25));
}

TEST_CASE("erf-scaled sigmoid matches sigmoid near zero") {
    Activation ses = Activation::erf_scaled_sigmoid();
    CHECK(ses.eval(0, 0.0) == doctest::Approx(0.5));
    CHECK(ses.eval(1, 0.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))));
}

TEST_CASE("derivatives agree with central finite differences") {
    Rng rng(11);
    const Activation kinds[] = {Activation::sigmoid(), Activation::erf_scaled_sigmoid(),
                                Activation::erf(), Activation::tanh(),
                                Activation::linear(0.3, -0.2)};
    for (const auto& act : kinds) {
        for (int i = 0; i < 30; ++i) {
            const double x = 6.0 * (rng.uniform() - 0.5);
            const double h = 1e-5;
            for (int order = 1; order <= 3; ++order) {
                const double fd =
                    (act.eval(order - 1, x + h) - act.eval(order - 1, x - h)) / (2.0 * h);
                CHECK(act.eval(order, x) == doctest::Approx(fd).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("unsupported derivative order is rejected") {
    CHECK_THROWS_AS(Activation::sigmoid().eval(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Activation::sigmoid().eval(-1, 0.0), std::invalid_argument);
}

TEST_CASE("activation names round trip") {
    for (const char* name :
         {"sigmoid", "erf_scaled_sigmoid", "erf", "tanh", "linear"}) {
        CHECK(std::string(to_name(activation_from_name(name).kind)) == name);
    }
    CHECK_THROWS_AS(activation_from_name("relu"), std::invalid_argument);
}
