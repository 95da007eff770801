#include "ntkae/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ntkae/finite_net.hpp"
#include "ntkae/regression.hpp"
#include "ntkae/rng.hpp"
#include "ntkae/spectrum.hpp"

namespace ntkae::checks {

namespace {

double operator_norm(const Eigen::MatrixXd& M) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues().maxCoeff();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return (k % 2) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// One moment-recursion step of the initialization distribution:
// alpha_hat^(l+1) = sigma(a), z_hat^(l+1) = sigma'(a) b over (a,b) ~ N(0, cov).
struct Prop2State {
    double aa, az, zz;
};

Prop2State prop2_step(const Prop2State& s, const Activation& act, const Quadrature& quad) {
    const CovPair cov{s.aa, s.az, s.zz};
    Prop2State next;
    next.aa = quad.expect1d(s.aa, [&](double a) {
        const double v = act.eval(0, a);
        return v * v;
    });
    next.az = quad.expect2d(cov, [&](double a, double b) {
        return act.eval(0, a) * act.eval(1, a) * b;
    });
    next.zz = quad.expect2d(cov, [&](double a, double b) {
        const double d = act.eval(1, a);
        return d * d * b * b;
    });
    return next;
}

std::vector<Prop2State> prop2_states(int depth, int n0, double xhat_norm,
                                     double xhat_dot_z0, const Activation& act,
                                     const Quadrature& quad) {
    Prop2State s{xhat_norm * xhat_norm / n0, xhat_dot_z0 / n0, 1.0 / n0};
    std::vector<Prop2State> states;
    // layer 1 moments from the input covariance
    states.push_back(prop2_step(s, act, quad));
    for (int l = 2; l <= depth - 1; ++l) {
        states.push_back(prop2_step(states.back(), act, quad));
    }
    return states;
}

// J(xhat) z0 for a sampled finite net, via the layer chain
// z~^(l) = W^(l-1) z^(l-1) / sqrt(n_{l-1}), z^(l) = sigma'(pre^(l)) . z~^(l).
Eigen::VectorXd jacobian_times(const NetworkParams& p, const ForwardTrace& tr,
                               const Eigen::VectorXd& z0) {
    Eigen::VectorXd z = z0;
    const int L = p.depth();
    for (int l = 0; l < L; ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
        Eigen::VectorXd zt = scale * (p.weights[l] * z);
        if (l + 1 < L) {
            z = tr.preacts[l]
                    .unaryExpr([&](double v) { return p.act.eval(1, v); })
                    .cwiseProduct(zt);
        } else {
            z = std::move(zt);
        }
    }
    return z;
}

}  // namespace

double prop2_output_variance(int depth, int n0, double xhat_norm, double xhat_dot_z0,
                             const Activation& act, const Quadrature& quad) {
    if (depth < 2) throw std::invalid_argument("prop2_output_variance: depth must be >= 2");
    return prop2_states(depth, n0, xhat_norm, xhat_dot_z0, act, quad).back().zz;
}

Prop2Summary prop2_montecarlo(int depth, int n0, const Eigen::VectorXd& xhat,
                              const Eigen::VectorXd& z0, int width, int net_samples,
                              std::uint64_t seed, const Quadrature& quad) {
    if (width < 32) throw std::invalid_argument("prop2_montecarlo: width must be >= 32");
    if (depth < 2) throw std::invalid_argument("prop2_montecarlo: depth must be >= 2");
    if (std::abs(z0.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("prop2_montecarlo: z0 must be a unit vector");
    }
    const Activation act = Activation::sigmoid();

    Prop2Summary out;
    const auto states = prop2_states(depth, n0, xhat.norm(), xhat.dot(z0), act, quad);
    for (const auto& s : states) {
        out.aa.push_back(s.aa);
        out.az.push_back(s.az);
        out.zz.push_back(s.zz);
    }
    out.analytic_output_var = states.back().zz;

    std::vector<int> dims(depth + 1, width);
    dims.front() = n0;
    dims.back() = n0;

    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    long count = 0;
    for (int s = 0; s < net_samples; ++s) {
        const NetworkParams p =
            NetworkParams::random(dims, act, rng_derive(seed, static_cast<std::uint64_t>(s)));
        const ForwardTrace tr = forward(p, xhat);
        const Eigen::VectorXd out_vec = jacobian_times(p, tr, z0);
        for (int i = 0; i < n0; ++i) {
            const double v = out_vec(i);
            sum += v;
            sum2 += v * v;
            sum4 += v * v * v * v;
            ++count;
        }
    }
    out.coord_samples = count;
    const double mean = sum / count;
    const double var = sum2 / count - mean * mean;
    out.empirical_output_var = var;
    out.kurtosis = (sum4 / count) / (var * var);
    return out;
}

InitJacobianReport thm1_depth_scan(const std::vector<int>& depths, int n0, int width,
                                   int seeds, std::uint64_t seed, const Activation& act,
                                   const Quadrature& quad) {
    if (width < 1000) throw std::invalid_argument("thm1_depth_scan: width must be >= 1000");
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n0);

    InitJacobianReport rep;
    rep.depths = depths;
    rep.width = width;
    double fitted_c = 0.0;
    for (int L : depths) {
        std::vector<int> dims(L + 1, width);
        dims.front() = n0;
        dims.back() = n0;
        std::vector<double> norms;
        for (int s = 0; s < seeds; ++s) {
            const NetworkParams p = NetworkParams::random(
                dims, act, rng_derive(seed, 1000ull * L + static_cast<std::uint64_t>(s)));
            norms.push_back(operator_norm(jacobian(p, origin)));
        }
        const double tau = prop2_output_variance(L, n0, 0.0, 0.0, act, quad);
        for (double v : norms) fitted_c = std::max(fitted_c, v / std::sqrt(n0 * tau));
        rep.medians.push_back(median(norms));
        rep.means.push_back(
            std::accumulate(norms.begin(), norms.end(), 0.0) / norms.size());
        rep.op_norms.push_back(std::move(norms));
        rep.tau.push_back(tau);
    }
    rep.fitted_c = fitted_c;
    for (double t : rep.tau) rep.bound.push_back(fitted_c * std::sqrt(n0 * t));
    return rep;
}

double tau_estimate(int depth, const Eigen::VectorXd& xhat, int random_candidates,
                    int width, std::uint64_t seed, const Activation& act,
                    const Quadrature& quad) {
    const int n0 = static_cast<int>(xhat.size());
    const double norm = xhat.norm();
    std::vector<double> dots;
    Rng rng(rng_derive(seed, 0x746175));
    for (int c = 0; c < random_candidates; ++c) {
        Eigen::VectorXd z(n0);
        for (int i = 0; i < n0; ++i) z(i) = rng.normal();
        z.normalize();
        dots.push_back(xhat.dot(z));
    }
    {
        std::vector<int> dims = {n0, width, n0};
        const NetworkParams p = NetworkParams::random(dims, act, rng_derive(seed, 0x773073));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            p.weights[0] / std::sqrt(static_cast<double>(n0)), Eigen::ComputeThinV);
        for (int i = 0; i < svd.matrixV().cols(); ++i) {
            dots.push_back(xhat.dot(svd.matrixV().col(i)));
        }
    }
    double sup = 0.0;
    for (double d : dots) {
        sup = std::max(sup, prop2_output_variance(depth, n0, norm, d, act, quad));
    }
    return sup;
}

LinearRegionReport linear_region_check(double alpha, double beta, const Dataset& data,
                                       int width, std::uint64_t seed, double window) {
    if (data.n() > data.n0()) {
        throw std::invalid_argument("linear_region_check: requires n <= n0");
    }
    const int n0 = data.n0();
    const int n = data.n();
    const Activation act = Activation::linear(alpha, beta);
    const NetworkParams net =
        NetworkParams::random({n0, width, n0}, act, rng_derive(seed, 0x6c696e));

    LinearRegionReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.window = window;

    const Eigen::MatrixXd j0 = jacobian(net, data.X.col(0));
    const double j0_norm = operator_norm(j0);
    rep.delta = 1.0 - j0_norm;
    rep.norm_condition = rep.delta > 0.0;
    rep.bias_norm =
        (net.weights[1] * Eigen::VectorXd::Ones(width)).norm() / std::sqrt(double(width));
    rep.bias_condition =
        beta == 0.0 ||
        rep.bias_norm < beta * n0 * rep.delta / (2.0 * data.r * alpha * alpha);

    // exact 2-layer kernel for sigma(x) = alpha x + beta
    const Eigen::MatrixXd gram = data.X.transpose() * data.X;
    Eigen::MatrixXd K = (2.0 * alpha * alpha / n0) * gram;
    K.array() += beta * beta;
    const KernelSystem ks = kernel_system_from_matrix(K, data.X, data.r, 2, act);

    const Eigen::MatrixXd dk = (2.0 * alpha * alpha / n0) * data.X.transpose();
    const Eigen::MatrixXd f0 = batch_forward(net, data.X);
    const Eigen::MatrixXd j_inf = (data.X - f0) * ks.solve(dk) + j0;

    const SpectrumReport sp = spectrum(j_inf, window);
    rep.multiplicity_observed = sp.count_near_one;
    rep.multiplicity_predicted = (beta == 0.0) ? n : n - 1;
    rep.largest_norm = sp.largest_norm;
    rep.max_identity_error =
        (j_inf - Eigen::MatrixXd::Identity(n0, n0)).cwiseAbs().maxCoeff();

    const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    rep.g = ones.dot(gram_ldlt.solve(ones));
    const double c = n0 * beta * beta / (2.0 * alpha * alpha);
    rep.lambda_hat = 1.0 / (1.0 + c * rep.g);

    Eigen::MatrixXd shifted = gram;
    shifted.array() += c;
    const Eigen::MatrixXd m = data.X * Eigen::LDLT<Eigen::MatrixXd>(shifted)
                                            .solve(data.X.transpose());
    const Eigen::VectorXd a = data.X * gram_ldlt.solve(ones);
    rep.eigpair_residual = (m * a - rep.lambda_hat * a).norm() / a.norm();
    return rep;
}

RankOneSpectrumReport rank_one_spectrum(const Eigen::MatrixXd& X, double c) {
    const int k = static_cast<int>(X.rows());
    const int m = static_cast<int>(X.cols());
    if (k < m || m < 2) {
        throw std::invalid_argument("rank_one_spectrum: requires k >= m >= 2");
    }
    if (c < 0.0) throw std::invalid_argument("rank_one_spectrum: c must be >= 0");
    const Eigen::MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram);
    if (ges.eigenvalues().minCoeff() <= 1e-12 * ges.eigenvalues().maxCoeff()) {
        throw std::invalid_argument("rank_one_spectrum: X^T X is numerically singular");
    }

    Eigen::MatrixXd shifted = gram;
    shifted.array() += c;
    const Eigen::MatrixXd m_direct =
        X * Eigen::LDLT<Eigen::MatrixXd>(shifted).solve(X.transpose());

    const Eigen::LDLT<Eigen::MatrixXd> gram_ldlt(gram);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    const double g = ones.dot(gram_ldlt.solve(ones));
    const Eigen::VectorXd a = X * gram_ldlt.solve(ones);
    const Eigen::MatrixXd m_miller = X * gram_ldlt.solve(X.transpose()) -
                                     (c / (1.0 + c * g)) * (a * a.transpose());

    RankOneSpectrumReport rep;
    rep.g = g;
    rep.lambda_hat = 1.0 / (1.0 + c * g);
    rep.path_difference = (m_direct - m_miller).cwiseAbs().maxCoeff();
    rep.eigpair_residual = (m_direct * a - rep.lambda_hat * a).norm() / a.norm();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_direct);
    rep.eigenvalues = es.eigenvalues().reverse();
    return rep;
}

GradientComponents gradient_component_norms(const Eigen::VectorXd& x1,
                                            const Eigen::VectorXd& xi) {
    const double r = x1.norm();
    if (std::abs(xi.norm() - r) > 1e-8 * r) {
        throw std::invalid_argument("gradient_component_norms: inputs must share a norm");
    }
    const double n0 = static_cast<double>(x1.size());
    const double rho = x1.dot(xi) / (r * r);

    auto [ig1, ig2] = ntk_gradient_parts_2layer(xi, x1);
    GradientComponents gc;
    gc.norm_ig1 = ig1.norm();
    gc.norm_ig2 = ig2.norm();
    gc.norm_total = (ig1 + ig2).norm();

    const double r2 = r * r;
    const double rr = rho * rho;
    const double num =
        r2 * (16.0 * std::pow(n0, 4) +
              r2 * (16.0 * std::pow(n0, 3) * (2.0 - rr) +
                    r2 * (4.0 * n0 * n0 * (6.0 - 5.0 * rr) +
                          r2 * (8.0 * n0 * (1.0 - rr) + r2 * (1.0 - rr)))));
    const double den = std::pow(r2 * r2 * (1.0 - rr) + 4.0 * n0 * r2 + 4.0 * n0 * n0, 3);
    gc.ig2_norm_sq_formula = num / (4.0 * M_PI * M_PI * den);
    return gc;
}

ParallelInputsReport parallel_inputs_check(const Dataset& data, const Quadrature& quad) {
    const int n = data.n();
    int p1 = -1, p2 = -1;
    int antipodal = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (data.rho(i, j) < -1.0 + 1e-9) {
                ++antipodal;
                p1 = i;
                p2 = j;
            } else if (data.rho(i, j) > 1.0 - 1e-9) {
                throw std::invalid_argument("parallel_inputs_check: duplicated inputs");
            }
        }
    }
    if (antipodal != 1) {
        throw std::invalid_argument(
            "parallel_inputs_check: expected exactly one antipodal pair, found " +
            std::to_string(antipodal));
    }

    const Activation act = Activation::erf_scaled_sigmoid();
    const KernelSystem ks = build_kernel_system(data, 2, act, quad);

    ParallelInputsReport rep;
    const double r2 = data.r * data.r;
    const double n0 = static_cast<double>(data.n0());
    rep.diag_entry = ks.K(p1, p1);
    rep.pair_entry_full = ks.K(p1, p2);
    rep.pair_entry_sigma2 =
        0.25 + std::asin(-r2 / (r2 + 2.0 * n0)) / (2.0 * M_PI);
    rep.neg_ik = -(r2 / (2.0 * M_PI)) / std::sqrt(4.0 * n0 * n0 + 4.0 * n0 * r2);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || (i == p1 && j == p2) || (i == p2 && j == p1)) continue;
            worst = std::max(worst, std::abs(ks.K(i, j)) / rep.diag_entry);
        }
    }
    rep.max_offpair_ratio = worst;

    const Eigen::MatrixXd j_inf =
        jacobian_infinity(data, ks, InitSurrogate::zero(), data.X.col(p1), false, quad);
    rep.j_infinity_norm = operator_norm(j_inf);
    return rep;
}

OrderedRegionReport chi1_diagnostic(const Activation& act, double q_init,
                                    const Quadrature& quad) {
    if (q_init < 0.0) throw std::invalid_argument("chi1_diagnostic: q_init must be >= 0");
    OrderedRegionReport rep;
    double q = q_init;
    rep.q_sequence.push_back(q);
    for (int it = 0; it < 1000; ++it) {
        const double next = quad.expect1d(q, [&](double u) {
            const double s = act.eval(0, u);
            return s * s;
        });
        rep.q_sequence.push_back(next);
        if (std::abs(next - q) < 1e-12) {
            rep.converged = true;
            q = next;
            break;
        }
        q = next;
    }
    rep.q_star = q;
    rep.chi1 = quad.expect1d(q, [&](double u) {
        const double d = act.eval(1, u);
        return d * d;
    });
    return rep;
}

namespace {

void push(std::vector<CheckRecord>& out, std::string name, double observed,
          double predicted, double tolerance, bool pass, bool hard,
          std::string note = "") {
    out.push_back({std::move(name), observed, predicted, tolerance, pass, hard,
                   std::move(note)});
}

}  // namespace

std::vector<CheckRecord> run_verification_battery(std::uint64_t seed, bool quick) {
    std::vector<CheckRecord> out;
    const Quadrature& quad = default_quadrature();
    const Activation sigmoid = Activation::sigmoid();
    const Activation ses = Activation::erf_scaled_sigmoid();
    Rng rng(rng_derive(seed, 0xba77e7));

    // Lemma 1: J_inf = I for sigma = alpha x, n = n0
    {
        double worst = 0.0;
        const int reps = quick ? 2 : 5;
        for (int n0 : {2, 4, 8}) {
            for (int rep = 0; rep < reps; ++rep) {
                Dataset d = random_dataset(n0, n0, 1.0 + rng.uniform(), rng);
                const auto lr =
                    linear_region_check(0.25, 0.0, d, quick ? 2048 : 16384, rng.next_u64());
                worst = std::max(worst, lr.max_identity_error);
            }
        }
        push(out, "lemma1_identity_max_error", worst, 0.0, 1e-6, worst < 1e-6, true);
    }

    // Lemma 2: multiplicity n for beta = 0, n < n0
    {
        Dataset d = random_dataset(8, 4, 1.0, rng);
        const auto lr = linear_region_check(0.25, 0.0, d, quick ? 2048 : 16384, rng.next_u64());
        push(out, "lemma2_multiplicity", lr.multiplicity_observed,
             lr.multiplicity_predicted, 0.0,
             lr.multiplicity_observed == lr.multiplicity_predicted, true);
    }

    // Lemma 3: multiplicity n-1 for beta > 0, plus the lambda_hat eigenpair
    {
        bool all_exact = true;
        double worst_resid = 0.0;
        int worst_obs = 0, worst_pred = 0;
        for (int n : {2, 5, 8}) {
            Dataset d = random_dataset(10, n, 1.0, rng);
            const auto lr =
                linear_region_check(0.25, 0.5, d, quick ? 2048 : 16384, rng.next_u64());
            if (lr.multiplicity_observed != lr.multiplicity_predicted) {
                all_exact = false;
                worst_obs = lr.multiplicity_observed;
                worst_pred = lr.multiplicity_predicted;
            }
            worst_resid = std::max(worst_resid, lr.eigpair_residual);
        }
        push(out, "lemma3_multiplicity", worst_obs, worst_pred, 0.0, all_exact, true,
             "n in {2,5,8}, n0=10, r=1");
        push(out, "lemma3_eigpair_residual", worst_resid, 0.0, 1e-10,
             worst_resid < 1e-10, true);
    }

    // Appendix C rank-one spectrum
    {
        double worst_path = 0.0, worst_resid = 0.0, worst_margin = 1e300;
        const int inst = quick ? 10 : 50;
        for (int i = 0; i < inst; ++i) {
            const int m = 2 + static_cast<int>(rng.uniform() * 5);
            const int k = m + static_cast<int>(rng.uniform() * 6);
            const double r = 0.5 + 2.0 * rng.uniform();
            Dataset d = random_dataset(k, m, r, rng);
            const double c = 10.0 * rng.uniform();
            const auto ro = rank_one_spectrum(d.X, c);
            worst_path = std::max(worst_path, ro.path_difference);
            worst_resid = std::max(worst_resid, ro.eigpair_residual);
            worst_margin = std::min(worst_margin, ro.g - 1.0 / (r * r));
        }
        push(out, "rank_one_path_difference", worst_path, 0.0, 1e-10,
             worst_path < 1e-10, true);
        push(out, "rank_one_eigpair_residual", worst_resid, 0.0, 1e-10,
             worst_resid < 1e-10, true);
        push(out, "rank_one_trace_bound_margin", worst_margin, 0.0, 1e-12,
             worst_margin >= -1e-12, true, "g - 1/r^2 >= 0");
    }

    // closed form vs quadrature recursion, erf-scaled sigmoid, L = 2
    {
        double worst = 0.0;
        const int pairs = quick ? 10 : 40;
        for (int i = 0; i < pairs; ++i) {
            const int n0 = 32;
            const double r = 100.0 * rng.uniform();
            Eigen::VectorXd a(n0), b(n0);
            for (int j = 0; j < n0; ++j) {
                a(j) = rng.normal();
                b(j) = rng.normal();
            }
            a *= r / a.norm();
            b *= (r * rng.uniform()) / b.norm();
            const double cf = closed_form_ntk_2layer(a, b);
            const double qr = ntk_recursion(a, b, 2, ses, quad).theta_final();
            worst = std::max(worst, std::abs(cf - qr));
        }
        push(out, "closed_form_vs_recursion", worst, 0.0, 1e-6, worst < 1e-6, true);
    }

    // gradient: closed form vs finite differences and vs the generic T formula
    {
        double worst_fd = 0.0, worst_mode = 0.0;
        const int pairs = quick ? 10 : 30;
        for (int i = 0; i < pairs; ++i) {
            const int n0 = 8;
            const double r = 0.5 + 30.0 * rng.uniform();
            Eigen::VectorXd a(n0), b(n0);
            for (int j = 0; j < n0; ++j) {
                a(j) = rng.normal();
                b(j) = rng.normal();
            }
            a *= r / a.norm();
            b *= r / b.norm();
            const Eigen::VectorXd gc =
                ntk_gradient_2layer(a, b, NtkGradMode::closed_form);
            const Eigen::VectorXd gg = ntk_gradient_2layer(a, b, NtkGradMode::generic, ses);
            worst_mode = std::max(worst_mode, (gc - gg).norm() / gc.norm());
            const double h = 1e-5 * r;
            Eigen::VectorXd fd(n0);
            for (int j = 0; j < n0; ++j) {
                Eigen::VectorXd bp = b, bm = b;
                bp(j) += h;
                bm(j) -= h;
                fd(j) = (closed_form_ntk_2layer(a, bp) - closed_form_ntk_2layer(a, bm)) /
                        (2.0 * h);
            }
            worst_fd = std::max(worst_fd, (gc - fd).norm() / gc.norm());
        }
        push(out, "gradient_vs_finite_difference", worst_fd, 0.0, 1e-5,
             worst_fd < 1e-5, true);
        push(out, "gradient_closed_vs_generic", worst_mode, 0.0, 1e-5,
             worst_mode < 1e-5, true);
    }

    // Lemma B.1 lower bound (one or more activation layers)
    {
        double worst = 1e300;
        const int draws = quick ? 100 : 400;
        for (int i = 0; i < draws; ++i) {
            const int n0 = 2 + static_cast<int>(rng.uniform() * 15);
            Eigen::VectorXd x(n0);
            for (int j = 0; j < n0; ++j) x(j) = rng.normal();
            x *= (1000.0 * rng.uniform()) / x.norm();
            for (int depth = 2; depth <= 6; ++depth) {
                const auto tr = ntk_recursion(x, x, depth, sigmoid, quad);
                worst = std::min(worst, tr.theta_final() - 0.25);
            }
        }
        push(out, "lemma_b1_theta_margin", worst, 0.0, 1e-9, worst >= -1e-9, true,
             "Theta(x,x) - 1/4");
    }

    // Cauchy-Schwarz at the two-point level
    {
        double worst = 0.0;
        for (int i = 0; i < (quick ? 10 : 30); ++i) {
            const int n0 = 6;
            Eigen::VectorXd a(n0), b(n0);
            for (int j = 0; j < n0; ++j) {
                a(j) = rng.normal();
                b(j) = rng.normal();
            }
            const auto tr = ntk_recursion(a, b, 3, sigmoid, quad);
            const auto& th = tr.theta.back();
            worst = std::max(worst, th.q_ab * th.q_ab - th.q_aa * th.q_bb);
        }
        push(out, "theta_cauchy_schwarz_excess", worst, 0.0, 1e-12, worst <= 1e-12, true);
    }

    // chi_1 diagnostics
    {
        const auto sig = chi1_diagnostic(sigmoid, 1.0, quad);
        push(out, "chi1_sigmoid_bound", sig.chi1, 1.0 / 16.0, 1e-12,
             sig.converged && sig.chi1 <= 1.0 / 16.0 + 1e-12, true);
        bool monotone = true;
        for (double q0 : {0.1, 1.0, 10.0}) {
            const auto r = chi1_diagnostic(sigmoid, q0, quad);
            for (std::size_t i = 2; i + 1 < r.q_sequence.size(); ++i) {
                const double d1 = r.q_sequence[i] - r.q_sequence[i - 1];
                const double d2 = r.q_sequence[i + 1] - r.q_sequence[i];
                if (d1 * d2 < -1e-20) monotone = false;
            }
        }
        push(out, "chi1_q_iteration_monotone", monotone ? 1.0 : 0.0, 1.0, 0.0, monotone,
             true);
        const auto er = chi1_diagnostic(Activation::erf(), 1.0, quad);
        const double closed = t_derf_derf({er.q_star, er.q_star, er.q_star});
        push(out, "chi1_erf_closed_form", er.chi1, closed, 1e-9,
             std::abs(er.chi1 - closed) < 1e-9, true);
    }

    // Appendix D.2 gradient components
    {
        const int n0 = 32;
        Eigen::VectorXd x1(n0);
        for (int j = 0; j < n0; ++j) x1(j) = rng.normal();
        x1 *= 1e4 / x1.norm();
        const auto gc = gradient_component_norms(x1, x1);
        const double limit = 1.0 / (8.0 * M_PI * std::sqrt(double(n0)));
        push(out, "gradient_component_rho1_limit", gc.norm_total, limit, 1e-3 * limit,
             std::abs(gc.norm_total - limit) < 1e-3 * limit, true, "r = 1e4");

        double worst_formula = 0.0;
        for (int i = 0; i < 10; ++i) {
            Eigen::VectorXd a(n0), b(n0);
            for (int j = 0; j < n0; ++j) {
                a(j) = rng.normal();
                b(j) = rng.normal();
            }
            const double r = 1.0 + 50.0 * rng.uniform();
            a *= r / a.norm();
            b *= r / b.norm();
            const auto g = gradient_component_norms(a, b);
            worst_formula = std::max(
                worst_formula, std::abs(g.norm_ig2 * g.norm_ig2 - g.ig2_norm_sq_formula) /
                                   std::max(g.ig2_norm_sq_formula, 1e-300));
        }
        push(out, "gradient_component_formula_match", worst_formula, 0.0, 1e-10,
             worst_formula < 1e-10, true);

        // spike of |I^g_2| at intermediate r for rho close to 1
        Eigen::VectorXd u1(n0), u2(n0);
        for (int j = 0; j < n0; ++j) {
            u1(j) = rng.normal();
            u2(j) = rng.normal();
        }
        u1.normalize();
        u2 -= u1.dot(u2) * u1;
        u2.normalize();
        const double rho = 0.999;
        double peak = 0.0, first = 0.0, last = 0.0;
        for (double r = 2.0; r <= 4096.0; r *= 1.2) {
            const Eigen::VectorXd a = r * u1;
            const Eigen::VectorXd b = r * (rho * u1 + std::sqrt(1 - rho * rho) * u2);
            const double v = gradient_component_norms(a, b).norm_ig2;
            if (first == 0.0) first = v;
            last = v;
            peak = std::max(peak, v);
        }
        const bool spike = peak > 1.5 * first && peak > 1.5 * last;
        push(out, "gradient_component_spike", spike ? 1.0 : 0.0, 1.0, 0.0, spike, true,
             "rho = 0.999");
    }

    // Appendix D.3 parallel inputs
    {
        const int n0 = 32;
        Rng drng(rng_derive(seed, 0xD3));
        Dataset base = random_dataset(n0, 5, 1e3, drng, 0.6);
        Eigen::MatrixXd X(n0, 6);
        X.col(0) = base.X.col(0);
        X.col(1) = -base.X.col(0);
        for (int j = 1; j < 5; ++j) X.col(j + 1) = base.X.col(j);
        Dataset d = Dataset::from_columns(X, /*allow_antipodal=*/true);
        const auto pr = parallel_inputs_check(d, quad);
        push(out, "parallel_offpair_ratio", pr.max_offpair_ratio, 0.0, 0.05,
             pr.max_offpair_ratio < 0.05, true);
        push(out, "parallel_pair_sigma2", std::abs(pr.pair_entry_sigma2), 0.0, 0.01,
             std::abs(pr.pair_entry_sigma2) < 0.01, true, "arcsin part at rho = -1");
        push(out, "parallel_jinf_norm", pr.j_infinity_norm, 0.5, 0.05,
             pr.j_infinity_norm <= 0.55, true);
    }

    // Prop. 2 Monte Carlo (soft: sampling noise)
    {
        const int n0 = 16;
        Eigen::VectorXd xhat(n0), z0(n0);
        Rng prng(rng_derive(seed, 0x9902));
        for (int j = 0; j < n0; ++j) {
            xhat(j) = prng.normal();
            z0(j) = prng.normal();
        }
        xhat *= 3.0 / xhat.norm();
        z0.normalize();
        const auto p2 = prop2_montecarlo(2, n0, xhat, z0, quick ? 1024 : 4096,
                                         quick ? 64 : 256, prng.next_u64(), quad);
        const double rel = std::abs(p2.empirical_output_var - p2.analytic_output_var) /
                           p2.analytic_output_var;
        push(out, "prop2_variance_rel_error", rel, 0.0, 0.1, rel < 0.1, false);
        push(out, "prop2_kurtosis", p2.kurtosis, 3.0, 0.5,
             std::abs(p2.kurtosis - 3.0) < 0.5, false);
    }

    // Thm. 1 depth decay and 1/2 concentration (soft: sampling noise)
    {
        const auto rep = thm1_depth_scan({2, 3}, quick ? 32 : 64, quick ? 1024 : 2048,
                                         quick ? 4 : 8, rng_derive(seed, 0x7131), sigmoid,
                                         quad);
        push(out, "thm1_mean_norm_L2", rep.means[0], 0.5, 0.1,
             std::abs(rep.means[0] - 0.5) < 0.1, false);
        const double ratio = rep.medians[1] / rep.medians[0];
        push(out, "thm1_depth_ratio", ratio, 0.25, 0.25, ratio <= 0.5, false);
        double worst = 0.0;
        for (std::size_t l = 0; l < rep.depths.size(); ++l) {
            for (double v : rep.op_norms[l]) worst = std::max(worst, v / rep.bound[l]);
        }
        push(out, "thm1_bound_exceedance", worst, 1.0, 2.0, worst <= 3.0, false,
             "max |J0| over fitted bound");
    }

    return out;
}

}  // namespace ntkae::checks
