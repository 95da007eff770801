#include "ntkae/dataset.hpp"

#include <stdexcept>
#include <string>

namespace ntkae {

Dataset Dataset::from_columns(Eigen::MatrixXd X, bool allow_antipodal) {
    const int n0 = static_cast<int>(X.rows());
    const int n = static_cast<int>(X.cols());
    if (n0 < 1 || n < 1) {
        throw std::invalid_argument("Dataset: empty data matrix");
    }
    Eigen::VectorXd norms = X.colwise().norm();
    const double r = norms.mean();
    if (!(r > 0.0)) {
        throw std::invalid_argument("Dataset: column norm must be positive");
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(norms(i) - r) > 1e-10 * r) {
            throw std::invalid_argument("Dataset: column " + std::to_string(i) +
                                        " norm deviates from the common norm");
        }
    }
    // columns entering the rank check; antipodal duplicates drop their mirror
    std::vector<int> distinct;
    for (int i = 0; i < n; ++i) {
        bool mirrored = false;
        if (allow_antipodal) {
            for (int j : distinct) {
                if (X.col(i).dot(X.col(j)) / (r * r) < -1.0 + 1e-9) mirrored = true;
            }
        }
        if (!mirrored) distinct.push_back(i);
    }
    const int m = static_cast<int>(distinct.size());
    if (m <= n0) {
        Eigen::MatrixXd sub(n0, m);
        for (int k = 0; k < m; ++k) sub.col(k) = X.col(distinct[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (qr.rank() < m) {
            throw std::invalid_argument("Dataset: data matrix is rank deficient");
        }
    }
    Dataset d;
    d.rho = (X.transpose() * X) / (r * r);
    for (int i = 0; i < n; ++i) {
        d.rho(i, i) = 1.0;
        for (int j = 0; j < n; ++j) {
            if (std::abs(d.rho(i, j)) > 1.0 + 1e-12) {
                throw std::invalid_argument("Dataset: cosine out of range");
            }
            d.rho(i, j) = std::clamp(d.rho(i, j), -1.0, 1.0);
        }
    }
    d.X = std::move(X);
    d.r = r;
    return d;
}

Dataset random_dataset(int n0, int n, double r, Rng& rng, double max_abs_cos) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Eigen::MatrixXd X(n0, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n0; ++i) X(i, j) = rng.normal();
            const double nrm = X.col(j).norm();
            if (nrm < 1e-12) {  // redraw the whole attempt
                X.setZero();
                break;
            }
            X.col(j) *= r / nrm;
        }
        // exact renormalization so the common-norm invariant holds bit-tight
        for (int j = 0; j < n; ++j) X.col(j) *= r / X.col(j).norm();

        bool separated = true;
        if (max_abs_cos < 1.0) {
            for (int i = 0; i < n && separated; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (std::abs(X.col(i).dot(X.col(j))) / (r * r) > max_abs_cos) {
                        separated = false;
                        break;
                    }
                }
            }
        }
        if (!separated) continue;
        try {
            return Dataset::from_columns(std::move(X));
        } catch (const std::invalid_argument&) {
            continue;  // rank-deficient draw, essentially measure zero
        }
    }
    throw std::runtime_error("random_dataset: could not draw a valid dataset");
}

}  // namespace ntkae
