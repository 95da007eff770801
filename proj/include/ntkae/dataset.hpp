#pragma once

#include <Eigen/Dense>

#include "ntkae/rng.hpp"

namespace ntkae {

// Training data: columns of X share the norm r; rho holds pairwise cosines.
struct Dataset {
    Eigen::MatrixXd X;    // n0 x n
    double r = 0.0;
    Eigen::MatrixXd rho;  // n x n, unit diagonal

    int n0() const { return static_cast<int>(X.rows()); }
    int n() const { return static_cast<int>(X.cols()); }

    // Validates the common norm (1e-10 relative), rank n when n <= n0, and
    // |rho_ij| <= 1. Throws std::invalid_argument on violation.
    // With allow_antipodal, x and -x may both appear; the rank requirement
    // then applies to the distinct directions only.
    static Dataset from_columns(Eigen::MatrixXd X, bool allow_antipodal = false);
};

// Columns drawn from a standard Gaussian and rescaled to norm r. When
// max_abs_cos < 1, pairs with |cos| above it are rejected and redrawn.
Dataset random_dataset(int n0, int n, double r, Rng& rng, double max_abs_cos = 1.0);

}  // namespace ntkae
