#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ntkae/activation.hpp"
#include "ntkae/dataset.hpp"
#include "ntkae/quadrature.hpp"

namespace ntkae {

// Full recursion trace for a pair of inputs. sigma[l] and theta[l] hold the
// layer-(l+1) entries for (xhat,xhat), (xhat,x), (x,x); sigma_dot starts at
// layer 2 (sigma_dot[k] belongs to layer k+2).
struct NtkTrace {
    std::vector<CovPair> sigma;
    std::vector<CovPair> sigma_dot;
    std::vector<CovPair> theta;

    double theta_final() const { return theta.back().q_ab; }
    double theta_diag_a() const { return theta.back().q_aa; }
    double theta_diag_b() const { return theta.back().q_bb; }
};

NtkTrace ntk_recursion(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x, int depth,
                       const Activation& act,
                       const Quadrature& quad = default_quadrature());

// Two-layer erf-scaled-sigmoid kernel:
//   (1/2pi) s / sqrt((2n0+|x|^2)(2n0+|xhat|^2) - s^2)
//   + (1/2pi) asin(s / sqrt((|x|^2+2n0)(|xhat|^2+2n0))) + 1/4,   s = xhat.x
double closed_form_ntk_2layer(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x);

enum class NtkGradMode { closed_form, generic };

// d Theta^(2)(xhat, x) / dx. closed_form requires the erf-scaled sigmoid;
// generic evaluates the four-term T-operator formula for any activation.
Eigen::VectorXd ntk_gradient_2layer(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x,
                                    NtkGradMode mode,
                                    const Activation& act = Activation::erf_scaled_sigmoid(),
                                    const Quadrature& quad = default_quadrature());

// The two closed-form pieces of the 2-layer gradient: the arcsin-part
// derivative and the derivative of the linear (first) term. Their sum is
// ntk_gradient_2layer(..., closed_form).
std::pair<Eigen::VectorXd, Eigen::VectorXd> ntk_gradient_parts_2layer(
    const Eigen::VectorXd& xhat, const Eigen::VectorXd& x);

struct NtkValueGrad {
    double theta = 0.0;
    Eigen::VectorXd grad;
};

// Theta^(depth)(xhat, x) together with its gradient in x, for any depth.
// The gradient recursion propagates d/dx through the covariance entries
// with the Gaussian integration-by-parts identities.
NtkValueGrad ntk_value_gradient(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x,
                                int depth, const Activation& act,
                                const Quadrature& quad = default_quadrature());

struct IllConditionedError : std::runtime_error {
    double condition;
    explicit IllConditionedError(double cond)
        : std::runtime_error("kernel matrix is numerically singular (condition ~ " +
                             std::to_string(cond) + ") after maximal jitter"),
          condition(cond) {}
};

// Gram matrix of the depth-L kernel over the training set, with a cached
// symmetric factorization. Jitter escalates 0 -> 1e-12 -> 1e-10 -> 1e-8 on
// the diagonal until the matrix is positive definite; the jitter actually
// used is recorded.
struct KernelSystem {
    Eigen::MatrixXd K;
    double jitter = 0.0;
    double condition = 0.0;
    int depth = 2;
    Activation act;
    Eigen::MatrixXd Xhat;
    double r = 0.0;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt.solve(b); }
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const { return llt.solve(B); }

    Eigen::LLT<Eigen::MatrixXd> llt;
};

KernelSystem build_kernel_system(const Dataset& data, int depth, const Activation& act,
                                 const Quadrature& quad = default_quadrature());

// For kernels assembled externally (e.g. exact linear-activation kernels).
KernelSystem kernel_system_from_matrix(Eigen::MatrixXd K, Eigen::MatrixXd Xhat, double r,
                                       int depth, const Activation& act);

struct KernelVec {
    Eigen::VectorXd k;    // n
    Eigen::MatrixXd dk;   // n x n0, row i = d Theta(x_i, x) / dx
};

KernelVec kernel_vector(const KernelSystem& ks, const Eigen::VectorXd& x,
                        const Quadrature& quad = default_quadrature());

}  // namespace ntkae
