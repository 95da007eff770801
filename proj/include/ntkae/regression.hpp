#pragma once

#include <Eigen/Dense>
#include <memory>

#include "ntkae/finite_net.hpp"
#include "ntkae/ntk.hpp"

namespace ntkae {

// Realization of the network-at-initialization terms f0, J0 in the kernel
// regression formulas: identically zero, or a sampled wide finite net.
class InitSurrogate {
  public:
    enum class Mode { zero, finite_width };

    static InitSurrogate zero() { return InitSurrogate(); }
    static InitSurrogate finite(int n0, int width, int depth, const Activation& act,
                                std::uint64_t seed);

    Mode mode() const { return mode_; }
    const NetworkParams& net() const { return *net_; }

    Eigen::VectorXd f0(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd f0(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd j0(const Eigen::VectorXd& x) const;

  private:
    Mode mode_ = Mode::zero;
    std::shared_ptr<const NetworkParams> net_;
};

// f_inf(x) = (Xhat - f0(Xhat)) K^-1 k_x + f0(x)
Eigen::VectorXd f_infinity(const Dataset& data, const KernelSystem& ks,
                           const InitSurrogate& init, const Eigen::VectorXd& x,
                           const Quadrature& quad = default_quadrature());

// J_inf(x) = (Xhat - f0(Xhat)) K^-1 dk_x/dx + J0(x); with approx_large_r the
// f0(Xhat) term is dropped from the first factor.
Eigen::MatrixXd jacobian_infinity(const Dataset& data, const KernelSystem& ks,
                                  const InitSurrogate& init, const Eigen::VectorXd& x,
                                  bool approx_large_r = false,
                                  const Quadrature& quad = default_quadrature());

}  // namespace ntkae
