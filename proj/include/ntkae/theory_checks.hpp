#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ntkae/dataset.hpp"
#include "ntkae/ntk.hpp"
#include "ntkae/quadrature.hpp"

namespace ntkae::checks {

// One structured pass/fail record; `hard` records count toward the verify
// exit code, soft ones are logged for inspection.
struct CheckRecord {
    std::string name;
    double observed = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool hard = true;
    std::string note;
};

// ---- initialization-distribution recursion ---------------------------------

struct Prop2Summary {
    std::vector<double> aa;  // E[(alpha_hat^l)^2], l = 1..L-1
    std::vector<double> az;  // E[alpha_hat^l z_hat^l]
    std::vector<double> zz;  // E[(z_hat^l)^2]
    double analytic_output_var = 0.0;  // variance of coordinates of J(xhat) z0
    double empirical_output_var = 0.0;
    double kurtosis = 0.0;             // ~3 for Gaussian coordinates
    long coord_samples = 0;
};

// (a) draws `net_samples` finite networks of the given width and pools the
// coordinates of J(xhat) z0; (b) evaluates the moment recursion by Gaussian
// quadrature. Widths below 32 are rejected.
Prop2Summary prop2_montecarlo(int depth, int n0, const Eigen::VectorXd& xhat,
                              const Eigen::VectorXd& z0, int width, int net_samples,
                              std::uint64_t seed,
                              const Quadrature& quad = default_quadrature());

// Analytic E[(z_hat^(L-1))^2] for given |xhat| and xhat.z0 (unit z0).
double prop2_output_variance(int depth, int n0, double xhat_norm, double xhat_dot_z0,
                             const Activation& act,
                             const Quadrature& quad = default_quadrature());

struct InitJacobianReport {
    std::vector<int> depths;
    int width = 0;
    std::vector<std::vector<double>> op_norms;  // per depth, one per seed
    std::vector<double> medians;
    std::vector<double> means;
    std::vector<double> tau;        // analytic sup of E[(z_hat^(L-1))^2]
    std::vector<double> bound;      // fitted_c * sqrt(n0 * tau)
    double fitted_c = 0.0;
};

// Samples |J0|_op at xhat = 0 across depths and fits the epsilon-net-style
// bound c sqrt(n0 tau). tau at xhat = 0 needs no candidate sweep (the (a,b)
// covariance vanishes for every unit z0).
InitJacobianReport thm1_depth_scan(const std::vector<int>& depths, int n0, int width,
                                   int seeds, std::uint64_t seed,
                                   const Activation& act = Activation::sigmoid(),
                                   const Quadrature& quad = default_quadrature());

// sup over candidate unit vectors z0 of the analytic output variance, for a
// training point xhat; candidates are random unit vectors plus the singular
// vectors of W0/sqrt(n0) of a sampled net.
double tau_estimate(int depth, const Eigen::VectorXd& xhat, int random_candidates,
                    int width, std::uint64_t seed, const Activation& act,
                    const Quadrature& quad = default_quadrature());

// ---- linear region ----------------------------------------------------------

struct LinearRegionReport {
    double alpha = 0.0, beta = 0.0;
    double delta = 0.0;        // 1 - |J0|_op
    double bias_norm = 0.0;    // |W1 1 / sqrt(n1)|
    bool norm_condition = false;   // delta > 0
    bool bias_condition = false;   // bias_norm < beta n0 delta / (2 r alpha^2)
    int multiplicity_observed = 0;
    int multiplicity_predicted = 0;
    double lambda_hat = 0.0;   // 1 / (1 + c g), c = n0 beta^2 / (2 alpha^2)
    double g = 0.0;            // trace(B (X^T X)^-1)
    double eigpair_residual = 0.0;
    double largest_norm = 0.0;
    double max_identity_error = 0.0;  // |J_inf - I|_max, meaningful when n == n0, beta == 0
    double window = 1e-3;
};

// Evaluates J_inf with the exact linear-activation kernel
// K = (2 alpha^2 / n0) X^T X + beta^2 * ones and a finite-width surrogate,
// and counts the eigenvalue-1 multiplicity.
LinearRegionReport linear_region_check(double alpha, double beta, const Dataset& data,
                                       int width, std::uint64_t seed,
                                       double window = 1e-3);

struct RankOneSpectrumReport {
    Eigen::VectorXd eigenvalues;   // of X (X^T X + c B)^-1 X^T, descending
    double lambda_hat = 0.0;
    double g = 0.0;
    double path_difference = 0.0;  // direct solve vs Miller update, max-abs
    double eigpair_residual = 0.0; // |M a - lambda_hat a| / |a|
};

RankOneSpectrumReport rank_one_spectrum(const Eigen::MatrixXd& X, double c);

// ---- beyond the linear region ----------------------------------------------

struct GradientComponents {
    double norm_ig1 = 0.0;
    double norm_ig2 = 0.0;
    double norm_total = 0.0;
    double ig2_norm_sq_formula = 0.0;  // rational expression in (rho, r, n0)
};

// Norms of the two closed-form gradient components of d Theta^(2)(x_i, x)/dx
// at x = x1, for inputs of equal norm.
GradientComponents gradient_component_norms(const Eigen::VectorXd& x1,
                                            const Eigen::VectorXd& xi);

struct ParallelInputsReport {
    double diag_entry = 0.0;          // K_11
    double pair_entry_full = 0.0;     // K_12 (antipodal pair)
    double pair_entry_sigma2 = 0.0;   // arcsin + 1/4 part only, -> 0 at large r
    double neg_ik = 0.0;              // -I_k prediction for the pair entry
    double max_offpair_ratio = 0.0;   // max |K_1j| / K_11 over j >= 3
    double j_infinity_norm = 0.0;     // zero-mode |J_inf(x1)|_op
};

// Requires exactly one antipodal pair in the data (columns 1 and 2 up to
// ordering); verifies the large-r block structure of the kernel and the
// zero-mode Jacobian bound.
ParallelInputsReport parallel_inputs_check(const Dataset& data,
                                           const Quadrature& quad = default_quadrature());

// ---- ordered region ---------------------------------------------------------

struct OrderedRegionReport {
    std::vector<double> q_sequence;
    double q_star = 0.0;
    double chi1 = 0.0;
    bool converged = false;
};

// Iterates q -> E[sigma(sqrt(q) z)^2] to its fixed point (tol 1e-12, at most
// 1000 steps) and evaluates chi_1 = E[sigma'(sqrt(q*) z)^2].
OrderedRegionReport chi1_diagnostic(const Activation& act, double q_init,
                                    const Quadrature& quad = default_quadrature());

// ---- aggregated battery -----------------------------------------------------

std::vector<CheckRecord> run_verification_battery(std::uint64_t seed, bool quick = false);

}  // namespace ntkae::checks
