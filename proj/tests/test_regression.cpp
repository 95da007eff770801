#include <cmath>

#include "doctest.h"
#include "ntkae/regression.hpp"
#include "ntkae/rng.hpp"
#include "ntkae/spectrum.hpp"

using namespace ntkae;

namespace {

Eigen::VectorXd random_vec(int n, double norm, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    v *= norm / v.norm();
    return v;
}

}  // namespace

TEST_CASE("spectrum of simple matrices") {
    SUBCASE("identity") {
        const SpectrumReport rep = spectrum(Eigen::MatrixXd::Identity(3, 3));
        CHECK(rep.largest_norm == doctest::Approx(1.0));
        CHECK(rep.operator_norm == doctest::Approx(1.0));
        CHECK(rep.count_near_one == 3);
    }
    SUBCASE("diagonal") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 0) = 0.5;
        d(1, 1) = -0.25;
        const SpectrumReport rep = spectrum(d);
        CHECK(rep.largest_norm == doctest::Approx(0.5));
        CHECK(rep.count_near_one == 0);
    }
    SUBCASE("rotation has eigenvalues +-i") {
        Eigen::MatrixXd rot(2, 2);
        rot << 0, 1, -1, 0;
        const SpectrumReport rep = spectrum(rot);
        CHECK(rep.largest_norm == doctest::Approx(1.0));
        CHECK(rep.operator_norm == doctest::Approx(1.0));
        CHECK(rep.eigenvalues(0).imag() == doctest::Approx(1.0));
        CHECK(rep.eigenvalues(1).imag() == doctest::Approx(-1.0));
    }
    SUBCASE("conjugate pairs and norm ordering on random matrices") {
        Rng rng(13);
        for (int t = 0; t < 5; ++t) {
            Eigen::MatrixXd m(6, 6);
            for (int i = 0; i < 36; ++i) m(i / 6, i % 6) = rng.normal();
            const SpectrumReport rep = spectrum(m);
            CHECK(rep.largest_norm <= rep.operator_norm + 1e-8);
            // every non-real eigenvalue pairs with its conjugate
            for (int i = 0; i < 6; ++i) {
                const auto l = rep.eigenvalues(i);
                if (std::abs(l.imag()) < 1e-12) continue;
                bool found = false;
                for (int j = 0; j < 6; ++j) {
                    if (std::abs(rep.eigenvalues(j) - std::conj(l)) < 1e-8) found = true;
                }
                CHECK(found);
            }
        }
    }
    SUBCASE("bad inputs") {
        CHECK_THROWS_AS(spectrum(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
        Eigen::MatrixXd nan2 = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
        CHECK_THROWS_AS(spectrum(nan2), std::invalid_argument);
    }
}

TEST_CASE("zero-mode regression interpolates the training set") {
    Rng rng(19);
    const Dataset d = random_dataset(8, 4, 3.0, rng);
    const KernelSystem ks = build_kernel_system(d, 2, Activation::erf_scaled_sigmoid());
    const InitSurrogate zero = InitSurrogate::zero();
    for (int i = 0; i < d.n(); ++i) {
        const Eigen::VectorXd f = f_infinity(d, ks, zero, d.X.col(i));
        CHECK((f - d.X.col(i)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("linear activation with n = n0 reproduces the projection identity") {
    Rng rng(21);
    const Dataset d = random_dataset(3, 3, 2.0, rng);
    const Activation lin = Activation::linear(0.3, 0.0);
    const KernelSystem ks = build_kernel_system(d, 2, lin);
    const Eigen::VectorXd x = random_vec(3, 5.0, rng);
    const Eigen::VectorXd f = f_infinity(d, ks, InitSurrogate::zero(), x);
    // X (X^T X)^-1 X^T x = x for square full-rank X
    const Eigen::VectorXd proj =
        d.X * (d.X.transpose() * d.X).ldlt().solve(d.X.transpose() * x);
    CHECK((proj - x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("deep kernels become constant and f_infinity follows") {
    Rng rng(27);
    const int n0 = 8;
    const Dataset d = random_dataset(n0, 1, 3.0, rng);
    const Eigen::VectorXd x1 = d.X.col(0);
    Eigen::VectorXd x = random_vec(n0, 3.0, rng);
    x -= x.dot(x1) / x1.squaredNorm() * x1;  // orthogonal probe point
    x *= 3.0 / x.norm();

    const Activation sig = Activation::sigmoid();
    const KernelSystem ks = build_kernel_system(d, 6, sig);
    const InitSurrogate init = InitSurrogate::finite(n0, 4096, 6, sig, 99);
    const Eigen::VectorXd f = f_infinity(d, ks, init, x);
    const Eigen::VectorXd constant_form = x1 - init.f0(x1) + init.f0(x);
    CHECK((f - constant_form).norm() / constant_form.norm() < 0.05);
}

TEST_CASE("finite-width surrogate is deterministic in its seed") {
    const InitSurrogate a = InitSurrogate::finite(6, 256, 2, Activation::sigmoid(), 4242);
    const InitSurrogate b = InitSurrogate::finite(6, 256, 2, Activation::sigmoid(), 4242);
    Rng rng(1);
    const Eigen::VectorXd x = random_vec(6, 2.0, rng);
    CHECK((a.f0(x) - b.f0(x)).norm() == 0.0);
    CHECK((a.j0(x) - b.j0(x)).norm() == 0.0);
}

TEST_CASE("jacobian_infinity equals identity in the Lemma 1 setting") {
    Rng rng(33);
    const Dataset d = random_dataset(3, 3, 1.5, rng);
    const Activation lin = Activation::linear(0.25, 0.0);
    const KernelSystem ks = build_kernel_system(d, 2, lin);
    const InitSurrogate init = InitSurrogate::finite(3, 4096, 2, lin, 7);
    const Eigen::MatrixXd j =
        jacobian_infinity(d, ks, init, random_vec(3, 2.0, rng));
    CHECK((j - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("jacobian_infinity matches finite differences of f_infinity") {
    Rng rng(39);
    SUBCASE("two layers, closed-form kernel, zero and finite modes") {
        for (int inst = 0; inst < 9; ++inst) {
            const double r = 0.5 + 6.0 * rng.uniform();
            const Dataset d = random_dataset(6, 3, r, rng);
            const KernelSystem ks =
                build_kernel_system(d, 2, Activation::erf_scaled_sigmoid());
            const InitSurrogate init =
                (inst % 3 == 2)
                    ? InitSurrogate::finite(6, 2048, 2, Activation::erf_scaled_sigmoid(),
                                            5 + inst)
                    : InitSurrogate::zero();
            const Eigen::VectorXd x = random_vec(6, r, rng);
            const Eigen::MatrixXd j = jacobian_infinity(d, ks, init, x);
            const double h = 1e-5 * d.r;
            Eigen::MatrixXd fd(6, 6);
            for (int c = 0; c < 6; ++c) {
                Eigen::VectorXd xp = x, xm = x;
                xp(c) += h;
                xm(c) -= h;
                fd.col(c) =
                    (f_infinity(d, ks, init, xp) - f_infinity(d, ks, init, xm)) / (2.0 * h);
            }
            CHECK((j - fd).norm() / j.norm() < 1e-4);
        }
    }
    SUBCASE("three layers, quadrature kernel") {
        const Dataset d = random_dataset(4, 2, 1.5, rng);
        const KernelSystem ks = build_kernel_system(d, 3, Activation::sigmoid());
        const Eigen::VectorXd x = random_vec(4, 1.5, rng);
        const Eigen::MatrixXd j = jacobian_infinity(d, ks, InitSurrogate::zero(), x);
        const double h = 1e-5 * d.r;
        Eigen::MatrixXd fd(4, 4);
        for (int c = 0; c < 4; ++c) {
            Eigen::VectorXd xp = x, xm = x;
            xp(c) += h;
            xm(c) -= h;
            fd.col(c) = (f_infinity(d, ks, InitSurrogate::zero(), xp) -
                         f_infinity(d, ks, InitSurrogate::zero(), xm)) /
                        (2.0 * h);
        }
        CHECK((j - fd).norm() / j.norm() < 1e-4);
    }
}

TEST_CASE("single example: the trained Jacobian approaches the initial one with depth") {
    Rng rng(61);
    const int n0 = 8;
    const Dataset d = random_dataset(n0, 1, std::sqrt(double(n0)), rng);
    const Activation sig = Activation::sigmoid();
    double prev_gap = 1e300;
    for (int depth : {2, 4, 6}) {
        const KernelSystem ks = build_kernel_system(d, depth, sig);
        const InitSurrogate init = InitSurrogate::finite(n0, 4096, depth, sig, 303);
        const Eigen::MatrixXd j_inf = jacobian_infinity(d, ks, init, d.X.col(0));
        const Eigen::MatrixXd j_0 = init.j0(d.X.col(0));
        const double gap =
            Eigen::BDCSVD<Eigen::MatrixXd>(j_inf - j_0).singularValues().maxCoeff();
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("single training point gives a rank-one zero-mode Jacobian") {
    Rng rng(45);
    const Dataset d = random_dataset(8, 1, 4.0, rng);
    const KernelSystem ks = build_kernel_system(d, 2, Activation::erf_scaled_sigmoid());
    const Eigen::MatrixXd j =
        jacobian_infinity(d, ks, InitSurrogate::zero(), d.X.col(0));
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(j).singularValues();
    CHECK(sv(0) > 0.0);
    CHECK(sv(1) < 1e-12 * sv(0));
}

TEST_CASE("large-radius approximation") {
    Rng rng(51);
    const int n0 = 8;
    const double r = 100.0 * std::sqrt(double(n0));
    const Dataset d = random_dataset(n0, 3, r, rng, 0.7);
    const KernelSystem ks = build_kernel_system(d, 2, Activation::erf_scaled_sigmoid());
    const Eigen::VectorXd x = d.X.col(0);
    SUBCASE("zero mode: both forms coincide exactly") {
        const Eigen::MatrixXd full =
            jacobian_infinity(d, ks, InitSurrogate::zero(), x, false);
        const Eigen::MatrixXd approx =
            jacobian_infinity(d, ks, InitSurrogate::zero(), x, true);
        CHECK((full - approx).norm() == 0.0);
    }
    SUBCASE("finite surrogate: forms differ below 1e-2 in operator norm") {
        const InitSurrogate init =
            InitSurrogate::finite(n0, 2048, 2, Activation::erf_scaled_sigmoid(), 12);
        const Eigen::MatrixXd full = jacobian_infinity(d, ks, init, x, false);
        const Eigen::MatrixXd approx = jacobian_infinity(d, ks, init, x, true);
        CHECK(Eigen::BDCSVD<Eigen::MatrixXd>(full - approx).singularValues().maxCoeff() <
              1e-2);
    }
}

TEST_CASE("sigmoid operator norm at large radius stays near one half") {
    Rng rng(57);
    const Dataset d = random_dataset(32, 20, 200.0, rng, 0.5);
    const KernelSystem ks = build_kernel_system(d, 2, Activation::sigmoid());
    const Eigen::MatrixXd j =
        jacobian_infinity(d, ks, InitSurrogate::zero(), d.X.col(0));
    const SpectrumReport rep = spectrum(j);
    CHECK(rep.operator_norm <= 0.55);
}
