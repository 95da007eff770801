#include "ntkae/ntk.hpp"

#include <cmath>

namespace ntkae {

namespace {

void check_dims(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x) {
    if (xhat.size() != x.size() || x.size() == 0) {
        throw std::invalid_argument("ntk: input dimensions must match and be nonzero");
    }
}

double expect_sq(const Quadrature& quad, double var, const Activation& act, int order) {
    return quad.expect1d(var, [&](double u) {
        const double s = act.eval(order, u);
        return s * s;
    });
}

}  // namespace

NtkTrace ntk_recursion(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x, int depth,
                       const Activation& act, const Quadrature& quad) {
    check_dims(xhat, x);
    if (depth < 1) throw std::invalid_argument("ntk_recursion: depth must be >= 1");
    const double n0 = static_cast<double>(x.size());
    // for identical inputs every pair entry equals the diagonal one
    const bool coincident = xhat == x;

    NtkTrace tr;
    CovPair sigma{xhat.squaredNorm() / n0, xhat.dot(x) / n0, x.squaredNorm() / n0, 1};
    tr.sigma.push_back(sigma);
    tr.theta.push_back(sigma);

    for (int layer = 2; layer <= depth; ++layer) {
        const CovPair& prev = tr.sigma.back();
        CovPair next;
        next.layer = layer;
        next.q_aa = expect_sq(quad, prev.q_aa, act, 0);
        next.q_bb = coincident ? next.q_aa : expect_sq(quad, prev.q_bb, act, 0);
        next.q_ab = coincident ? next.q_aa : t_operator(prev, 0, 0, act, quad);

        CovPair dot;
        dot.layer = layer;
        dot.q_aa = expect_sq(quad, prev.q_aa, act, 1);
        dot.q_bb = coincident ? dot.q_aa : expect_sq(quad, prev.q_bb, act, 1);
        dot.q_ab = coincident ? dot.q_aa : t_operator(prev, 1, 1, act, quad);

        const CovPair& th = tr.theta.back();
        CovPair theta;
        theta.layer = layer;
        theta.q_aa = th.q_aa * dot.q_aa + next.q_aa;
        theta.q_ab = th.q_ab * dot.q_ab + next.q_ab;
        theta.q_bb = th.q_bb * dot.q_bb + next.q_bb;

        tr.sigma.push_back(next);
        tr.sigma_dot.push_back(dot);
        tr.theta.push_back(theta);
    }
    return tr;
}

double closed_form_ntk_2layer(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x) {
    check_dims(xhat, x);
    const double m = 2.0 * static_cast<double>(x.size());
    const double shh = xhat.squaredNorm();
    const double sxx = x.squaredNorm();
    const double shx = xhat.dot(x);

    const double det = (m + sxx) * (m + shh) - shx * shx;
    if (det <= 0.0) {
        throw std::invalid_argument("closed_form_ntk_2layer: degenerate input pair");
    }
    const double lin = shx / (2.0 * M_PI * std::sqrt(det));
    const double arg = std::clamp(shx / std::sqrt((sxx + m) * (shh + m)), -1.0, 1.0);
    return lin + std::asin(arg) / (2.0 * M_PI) + 0.25;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ntk_gradient_parts_2layer(
    const Eigen::VectorXd& xhat, const Eigen::VectorXd& x) {
    check_dims(xhat, x);
    const double m = 2.0 * static_cast<double>(x.size());
    const double shh = xhat.squaredNorm();
    const double sxx = x.squaredNorm();
    const double shx = xhat.dot(x);

    const double p = (shh + m) * (sxx + m);
    const double det = p - shx * shx;
    if (det <= 0.0) {
        throw std::invalid_argument("ntk_gradient_parts_2layer: degenerate input pair");
    }
    // gradient of the arcsin part
    Eigen::VectorXd ig1 =
        (p * xhat - (shh + m) * shx * x) / (2.0 * M_PI * std::sqrt(det) * p);
    // gradient of the linear part
    Eigen::VectorXd ig2 = (det * xhat - shx * ((m + shh) * x - shx * xhat)) /
                          (2.0 * M_PI * std::pow(det, 1.5));
    return {std::move(ig1), std::move(ig2)};
}

Eigen::VectorXd ntk_gradient_2layer(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x,
                                    NtkGradMode mode, const Activation& act,
                                    const Quadrature& quad) {
    check_dims(xhat, x);
    if (mode == NtkGradMode::closed_form) {
        if (act.kind != ActKind::erf_scaled_sigmoid) {
            throw std::invalid_argument(
                "ntk_gradient_2layer: closed form requires the erf-scaled sigmoid");
        }
        auto [ig1, ig2] = ntk_gradient_parts_2layer(xhat, x);
        return ig1 + ig2;
    }
    return ntk_value_gradient(xhat, x, 2, act, quad).grad;
}

NtkValueGrad ntk_value_gradient(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x,
                                int depth, const Activation& act, const Quadrature& quad) {
    check_dims(xhat, x);
    if (depth < 1) throw std::invalid_argument("ntk_value_gradient: depth must be >= 1");
    const double n0 = static_cast<double>(x.size());

    CovPair cov{xhat.squaredNorm() / n0, xhat.dot(x) / n0, x.squaredNorm() / n0, 1};
    Eigen::VectorXd dcov_ab = xhat / n0;
    Eigen::VectorXd dcov_bb = 2.0 * x / n0;
    double theta = cov.q_ab;
    Eigen::VectorXd dtheta = dcov_ab;

    for (int layer = 2; layer <= depth; ++layer) {
        const double t00 = t_operator(cov, 0, 0, act, quad);
        const double t11 = t_operator(cov, 1, 1, act, quad);
        const double t02 = t_operator(cov, 0, 2, act, quad);
        const double t22 = t_operator(cov, 2, 2, act, quad);
        const double t13 = t_operator(cov, 1, 3, act, quad);

        Eigen::VectorXd dsigma_ab = t11 * dcov_ab + 0.5 * t02 * dcov_bb;
        Eigen::VectorXd dsigma_dot_ab = t22 * dcov_ab + 0.5 * t13 * dcov_bb;
        const double diag_sens =
            quad.expect1d(cov.q_bb, [&](double v) {
                const double s1 = act.eval(1, v);
                return act.eval(0, v) * act.eval(2, v) + s1 * s1;
            });
        Eigen::VectorXd dsigma_bb = diag_sens * dcov_bb;

        dtheta = dtheta * t11 + theta * dsigma_dot_ab + dsigma_ab;
        theta = theta * t11 + t00;

        CovPair next;
        next.layer = layer;
        next.q_aa = expect_sq(quad, cov.q_aa, act, 0);
        next.q_bb = expect_sq(quad, cov.q_bb, act, 0);
        next.q_ab = t00;
        cov = next;
        dcov_ab = std::move(dsigma_ab);
        dcov_bb = std::move(dsigma_bb);
    }
    return {theta, std::move(dtheta)};
}

namespace {

KernelSystem factorize(KernelSystem ks) {
    const int n = static_cast<int>(ks.K.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ks.K);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    static const double schedule[] = {0.0, 1e-12, 1e-10, 1e-8};

    for (double j : schedule) {
        if (lmin + j > lmax * 1e-14 && lmin + j > 0.0) {
            Eigen::MatrixXd shifted = ks.K;
            shifted.diagonal().array() += j;
            ks.llt.compute(shifted);
            if (ks.llt.info() == Eigen::Success) {
                ks.jitter = j;
                ks.condition = (lmax + j) / (lmin + j);
                return ks;
            }
        }
    }
    throw IllConditionedError(lmax / std::max(lmin, lmax * 1e-300 / n));
}

bool use_closed_form(int depth, const Activation& act) {
    return depth == 2 && act.kind == ActKind::erf_scaled_sigmoid;
}

}  // namespace

KernelSystem build_kernel_system(const Dataset& data, int depth, const Activation& act,
                                 const Quadrature& quad) {
    if (depth < 1) throw std::invalid_argument("build_kernel_system: depth must be >= 1");
    const int n = data.n();
    KernelSystem ks;
    ks.K.resize(n, n);
    ks.depth = depth;
    ks.act = act;
    ks.Xhat = data.X;
    ks.r = data.r;

    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v;
            if (use_closed_form(depth, act)) {
                v = closed_form_ntk_2layer(data.X.col(i), data.X.col(j));
            } else {
                v = ntk_recursion(data.X.col(i), data.X.col(j), depth, act, quad)
                        .theta_final();
            }
            ks.K(i, j) = v;
            ks.K(j, i) = v;
        }
    }
    return factorize(std::move(ks));
}

KernelSystem kernel_system_from_matrix(Eigen::MatrixXd K, Eigen::MatrixXd Xhat, double r,
                                       int depth, const Activation& act) {
    if (K.rows() != K.cols() || K.rows() != Xhat.cols()) {
        throw std::invalid_argument("kernel_system_from_matrix: shape mismatch");
    }
    KernelSystem ks;
    ks.K = std::move(K);
    ks.Xhat = std::move(Xhat);
    ks.r = r;
    ks.depth = depth;
    ks.act = act;
    return factorize(std::move(ks));
}

KernelVec kernel_vector(const KernelSystem& ks, const Eigen::VectorXd& x,
                        const Quadrature& quad) {
    if (x.size() != ks.Xhat.rows()) {
        throw std::invalid_argument("kernel_vector: dimension mismatch");
    }
    const int n = static_cast<int>(ks.Xhat.cols());
    KernelVec kv;
    kv.k.resize(n);
    kv.dk.resize(n, x.size());
    for (int i = 0; i < n; ++i) {
        if (use_closed_form(ks.depth, ks.act)) {
            kv.k(i) = closed_form_ntk_2layer(ks.Xhat.col(i), x);
            kv.dk.row(i) =
                ntk_gradient_2layer(ks.Xhat.col(i), x, NtkGradMode::closed_form).transpose();
        } else {
            NtkValueGrad vg = ntk_value_gradient(ks.Xhat.col(i), x, ks.depth, ks.act, quad);
            kv.k(i) = vg.theta;
            kv.dk.row(i) = vg.grad.transpose();
        }
    }
    return kv;
}

}  // namespace ntkae
