#pragma once

#include <Eigen/Dense>

namespace ntkae {

struct SpectrumReport {
    Eigen::VectorXcd eigenvalues;  // sorted by modulus, descending
    double largest_norm = 0.0;
    double operator_norm = 0.0;    // largest singular value
    int count_near_one = 0;        // #{ |lambda - 1| < window }
    double window = 1e-3;
};

// Dense nonsymmetric eigendecomposition plus singular values. Throws
// std::runtime_error if the eigensolver fails to converge.
SpectrumReport spectrum(const Eigen::MatrixXd& J, double window = 1e-3);

}  // namespace ntkae
