#include "ntkae/spectrum.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ntkae {

SpectrumReport spectrum(const Eigen::MatrixXd& J, double window) {
    if (J.rows() != J.cols() || J.rows() == 0) {
        throw std::invalid_argument("spectrum: matrix must be square and nonempty");
    }
    if (!J.allFinite()) {
        throw std::invalid_argument("spectrum: matrix has non-finite entries");
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(J, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("spectrum: eigensolver did not converge");
    }

    std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                         es.eigenvalues().data() + J.rows());
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        const double na = std::abs(a), nb = std::abs(b);
        if (na != nb) return na > nb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });

    SpectrumReport rep;
    rep.window = window;
    rep.eigenvalues.resize(J.rows());
    for (Eigen::Index i = 0; i < J.rows(); ++i) rep.eigenvalues(i) = ev[i];
    rep.largest_norm = std::abs(ev.front());
    for (const auto& l : ev) {
        if (std::abs(l - std::complex<double>(1.0, 0.0)) < window) ++rep.count_near_one;
    }
    rep.operator_norm =
        Eigen::BDCSVD<Eigen::MatrixXd>(J).singularValues().maxCoeff();
    return rep;
}

}  // namespace ntkae
