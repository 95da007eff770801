#include <cmath>

#include "doctest.h"
#include "ntkae/ntk.hpp"
#include "ntkae/rng.hpp"

using namespace ntkae;

namespace {

Eigen::VectorXd random_vec(int n, double norm, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    v *= norm / v.norm();
    return v;
}

}  // namespace

TEST_CASE("first layer kernel is the normalized inner product") {
    const int n0 = 8;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n0);  // |x|^2 = n0
    const auto tr = ntk_recursion(x, x, 1, Activation::sigmoid());
    CHECK(tr.theta_final() == doctest::Approx(1.0));
    CHECK(tr.sigma.size() == 1);
    CHECK(tr.theta.size() == 1);
}

TEST_CASE("two-layer kernel at the origin") {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
    const auto tr = ntk_recursion(z, z, 2, Activation::sigmoid());
    CHECK(tr.theta_final() == doctest::Approx(0.25));
}

TEST_CASE("closed form at orthogonal and zero inputs") {
    const int n0 = 16;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n0);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n0);
    a(0) = 3.0;
    b(1) = 5.0;
    CHECK(closed_form_ntk_2layer(a, b) == doctest::Approx(0.25));
    CHECK(closed_form_ntk_2layer(a, Eigen::VectorXd::Zero(n0)) == doctest::Approx(0.25));
}

TEST_CASE("closed form diagonal at large radius approaches r/(4 pi sqrt(n0))") {
    const int n0 = 32;
    Rng rng(5);
    const Eigen::VectorXd x = random_vec(n0, 1000.0, rng);
    const double v = closed_form_ntk_2layer(x, x);
    CHECK(v == doctest::Approx(14.5654).epsilon(1e-4));
    const double asym = 1000.0 / (4.0 * M_PI * std::sqrt(double(n0)));
    CHECK(std::abs(v - asym) / asym < 0.05);
}

TEST_CASE("quadrature recursion matches the closed form for the rescaled erf") {
    Rng rng(17);
    const Activation ses = Activation::erf_scaled_sigmoid();
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
        const int n0 = 32;
        const Eigen::VectorXd a = random_vec(n0, 0.5 + 99.5 * rng.uniform(), rng);
        const Eigen::VectorXd b = random_vec(n0, 0.5 + 99.5 * rng.uniform(), rng);
        worst = std::max(worst, std::abs(closed_form_ntk_2layer(a, b) -
                                         ntk_recursion(a, b, 2, ses).theta_final()));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("gradient at x = 0 is parallel to xhat") {
    Rng rng(3);
    const int n0 = 12;
    const Eigen::VectorXd xhat = random_vec(n0, 4.0, rng);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n0);
    for (auto mode : {NtkGradMode::closed_form, NtkGradMode::generic}) {
        const Eigen::VectorXd g = ntk_gradient_2layer(xhat, zero, mode);
        const double cos =
            std::abs(g.dot(xhat)) / (g.norm() * xhat.norm());
        CHECK(cos == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gradient norm at a large-radius diagonal point") {
    Rng rng(9);
    const int n0 = 32;
    const Eigen::VectorXd x = random_vec(n0, 1000.0, rng);
    const double norm = ntk_gradient_2layer(x, x, NtkGradMode::closed_form).norm();
    CHECK(norm * 8.0 * M_PI * std::sqrt(double(n0)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("closed-form gradient matches finite differences") {
    Rng rng(23);
    const int n0 = 8;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.5 + 20.0 * rng.uniform();
        const Eigen::VectorXd a = random_vec(n0, r, rng);
        Eigen::VectorXd b = random_vec(n0, r * (0.2 + 0.8 * rng.uniform()), rng);
        const Eigen::VectorXd g = ntk_gradient_2layer(a, b, NtkGradMode::closed_form);
        const double h = 1e-5;
        Eigen::VectorXd fd(n0);
        for (int j = 0; j < n0; ++j) {
            Eigen::VectorXd bp = b, bm = b;
            bp(j) += h;
            bm(j) -= h;
            fd(j) = (closed_form_ntk_2layer(a, bp) - closed_form_ntk_2layer(a, bm)) /
                    (2.0 * h);
        }
        worst = std::max(worst, (g - fd).norm() / g.norm());
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("generic and closed-form gradient modes agree") {
    Rng rng(29);
    const int n0 = 8;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd a = random_vec(n0, 0.5 + 30.0 * rng.uniform(), rng);
        const Eigen::VectorXd b = random_vec(n0, 0.5 + 30.0 * rng.uniform(), rng);
        const Eigen::VectorXd gc = ntk_gradient_2layer(a, b, NtkGradMode::closed_form);
        const Eigen::VectorXd gg =
            ntk_gradient_2layer(a, b, NtkGradMode::generic, Activation::erf_scaled_sigmoid());
        worst = std::max(worst, (gc - gg).norm() / gc.norm());
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("depth-3 value-and-gradient chain agrees with finite differences") {
    Rng rng(31);
    const int n0 = 4;
    const Activation sig = Activation::sigmoid();
    const Eigen::VectorXd a = random_vec(n0, 2.0, rng);
    const Eigen::VectorXd b = random_vec(n0, 3.0, rng);
    const NtkValueGrad vg = ntk_value_gradient(a, b, 3, sig);
    CHECK(vg.theta ==
          doctest::Approx(ntk_recursion(a, b, 3, sig).theta_final()).epsilon(1e-12));
    const double h = 1e-5;
    for (int j = 0; j < n0; ++j) {
        Eigen::VectorXd bp = b, bm = b;
        bp(j) += h;
        bm(j) -= h;
        const double fd = (ntk_recursion(a, bp, 3, sig).theta_final() -
                           ntk_recursion(a, bm, 3, sig).theta_final()) /
                          (2.0 * h);
        CHECK(vg.grad(j) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("kernel Cauchy-Schwarz holds along the recursion") {
    Rng rng(37);
    for (int i = 0; i < 15; ++i) {
        const int n0 = 6;
        Eigen::VectorXd a(n0), b(n0);
        for (int j = 0; j < n0; ++j) {
            a(j) = 3.0 * rng.normal();
            b(j) = 3.0 * rng.normal();
        }
        for (const auto& act : {Activation::sigmoid(), Activation::tanh()}) {
            const auto tr = ntk_recursion(a, b, 3, act);
            for (const auto& th : tr.theta) {
                CHECK(th.q_ab * th.q_ab <= th.q_aa * th.q_bb + 1e-12);
            }
        }
    }
}

TEST_CASE("sigmoid diagonal kernel stays above one quarter") {
    Rng rng(41);
    double worst = 1e300;
    for (int i = 0; i < 60; ++i) {
        const int n0 = 2 + static_cast<int>(rng.uniform() * 20);
        const Eigen::VectorXd x = random_vec(n0, 1000.0 * rng.uniform() + 1e-6, rng);
        for (int depth = 2; depth <= 6; ++depth) {
            worst = std::min(worst,
                             ntk_recursion(x, x, depth, Activation::sigmoid()).theta_final());
        }
    }
    CHECK(worst >= 0.25 - 1e-9);
}

TEST_CASE("gram matrix basics") {
    Rng rng(43);
    SUBCASE("single point") {
        const Dataset d = random_dataset(8, 1, 5.0, rng);
        const KernelSystem ks = build_kernel_system(d, 3, Activation::sigmoid());
        CHECK(ks.K.rows() == 1);
        CHECK(ks.K(0, 0) >= 0.25);
    }
    SUBCASE("symmetry and positive diagonal") {
        const Dataset d = random_dataset(10, 4, 2.0, rng);
        const KernelSystem ks = build_kernel_system(d, 2, Activation::erf_scaled_sigmoid());
        CHECK((ks.K - ks.K.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < 4; ++i) CHECK(ks.K(i, i) > 0.0);
        CHECK(ks.condition >= 1.0);
    }
    SUBCASE("closed-form and recursion paths agree on k_x and its gradient") {
        const Dataset d = random_dataset(6, 3, 4.0, rng);
        const Activation ses = Activation::erf_scaled_sigmoid();
        const KernelSystem closed = build_kernel_system(d, 2, ses);
        const Eigen::VectorXd x = random_vec(6, 3.0, rng);
        const KernelVec kv_closed = kernel_vector(closed, x);
        const KernelVec kv_generic = [&] {
            KernelVec kv;
            kv.k.resize(3);
            kv.dk.resize(3, 6);
            for (int i = 0; i < 3; ++i) {
                const auto vg = ntk_value_gradient(d.X.col(i), x, 2, ses);
                kv.k(i) = vg.theta;
                kv.dk.row(i) = vg.grad.transpose();
            }
            return kv;
        }();
        CHECK((kv_closed.k - kv_generic.k).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((kv_closed.dk - kv_generic.dk).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("jitter escalation and the ill-conditioned error") {
    Eigen::MatrixXd x(2, 2);
    x << 1.0, 1.0, 0.0, 1e-9;
    SUBCASE("nearly singular kernel picks up jitter") {
        Eigen::MatrixXd K(2, 2);
        K << 1.0, 1.0, 1.0, 1.0;  // rank one
        const KernelSystem ks =
            kernel_system_from_matrix(K, x, 1.0, 2, Activation::sigmoid());
        CHECK(ks.jitter > 0.0);
        CHECK(ks.jitter <= 1e-8);
    }
    SUBCASE("hopeless kernel reports its condition") {
        Eigen::MatrixXd K(2, 2);
        K << 1e9, 1e9, 1e9, 1e9;
        CHECK_THROWS_AS(kernel_system_from_matrix(K, x, 1.0, 2, Activation::sigmoid()),
                        IllConditionedError);
    }
}

TEST_CASE("dataset construction rejects bad inputs") {
    Rng rng(47);
    SUBCASE("mismatched norms") {
        Eigen::MatrixXd X(3, 2);
        X << 1, 2, 0, 0, 0, 0;
        CHECK_THROWS_AS(Dataset::from_columns(X), std::invalid_argument);
    }
    SUBCASE("rank deficiency") {
        Eigen::MatrixXd X(3, 2);
        X.col(0) << 1, 0, 0;
        X.col(1) << -1, 0, 0;
        CHECK_THROWS_AS(Dataset::from_columns(X), std::invalid_argument);
    }
    SUBCASE("valid random dataset") {
        const Dataset d = random_dataset(8, 4, 3.0, rng, 0.7);
        CHECK(d.n0() == 8);
        CHECK(d.n() == 4);
        for (int i = 0; i < 4; ++i) {
            CHECK(d.X.col(i).norm() == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(d.rho(i, i) == 1.0);
            for (int j = 0; j < i; ++j) CHECK(std::abs(d.rho(i, j)) <= 0.7);
        }
    }
}
