#include "ntkae/regression.hpp"

namespace ntkae {

InitSurrogate InitSurrogate::finite(int n0, int width, int depth, const Activation& act,
                                    std::uint64_t seed) {
    if (depth < 2) {
        throw std::invalid_argument("InitSurrogate::finite: depth must be >= 2");
    }
    std::vector<int> dims(depth + 1, width);
    dims.front() = n0;
    dims.back() = n0;
    InitSurrogate s;
    s.mode_ = Mode::finite_width;
    s.net_ = std::make_shared<NetworkParams>(NetworkParams::random(dims, act, seed));
    return s;
}

Eigen::VectorXd InitSurrogate::f0(const Eigen::VectorXd& x) const {
    if (mode_ == Mode::zero) return Eigen::VectorXd::Zero(x.size());
    return forward(*net_, x).output();
}

Eigen::MatrixXd InitSurrogate::f0(const Eigen::MatrixXd& X) const {
    if (mode_ == Mode::zero) return Eigen::MatrixXd::Zero(X.rows(), X.cols());
    return batch_forward(*net_, X);
}

Eigen::MatrixXd InitSurrogate::j0(const Eigen::VectorXd& x) const {
    if (mode_ == Mode::zero) return Eigen::MatrixXd::Zero(x.size(), x.size());
    return jacobian(*net_, x);
}

Eigen::VectorXd f_infinity(const Dataset& data, const KernelSystem& ks,
                           const InitSurrogate& init, const Eigen::VectorXd& x,
                           const Quadrature& quad) {
    const KernelVec kv = kernel_vector(ks, x, quad);
    const Eigen::MatrixXd targets = data.X - init.f0(data.X);
    return targets * ks.solve(kv.k) + init.f0(x);
}

Eigen::MatrixXd jacobian_infinity(const Dataset& data, const KernelSystem& ks,
                                  const InitSurrogate& init, const Eigen::VectorXd& x,
                                  bool approx_large_r, const Quadrature& quad) {
    const KernelVec kv = kernel_vector(ks, x, quad);
    Eigen::MatrixXd targets = data.X;
    if (!approx_large_r) targets -= init.f0(data.X);
    return targets * ks.solve(kv.dk) + init.j0(x);
}

}  // namespace ntkae
