#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ntkae/activation.hpp"

namespace ntkae {

// Entries of a 2x2 Gaussian covariance used throughout the kernel recursions.
struct CovPair {
    double q_aa = 0.0;
    double q_ab = 0.0;
    double q_bb = 0.0;
    int layer = 0;

    bool is_psd(double rel_tol = 1e-9) const {
        if (q_aa < 0.0 || q_bb < 0.0) return false;
        return q_ab * q_ab <= q_aa * q_bb * (1.0 + rel_tol) + 1e-300;
    }
};

// Gaussian expectations of one- and two-variable integrands.
//
// Integration runs in whitened coordinates over [-13, 13] standard deviations
// with composite Gauss-Legendre panels. Panels are geometrically refined
// around the points where the integrand has sharp features (the activation
// transition at zero), so accuracy is uniform in the covariance scale: sharp
// sigmoids at variance 1e4 and beyond are resolved as well as order-one ones.
// `order` is the number of Gauss-Legendre points per panel.
class Quadrature {
  public:
    explicit Quadrature(int order = 16);

    int order() const { return order_; }

    // E[g(u)], u ~ N(0, var)
    template <class G>
    double expect1d(double var, G&& g) const {
        if (!(var >= 0.0) || !std::isfinite(var)) {
            throw std::invalid_argument("expect1d: variance must be finite and >= 0");
        }
        if (var < kPointMass) return g(0.0);
        const double s = std::sqrt(var);
        std::vector<double> bp;
        build_breakpoints(0.0, std::min(1.0, 1.0 / s), bp);
        double acc = 0.0;
        integrate_panels(bp, [&](double z, double w) { acc += w * g(s * z); });
        return acc;
    }

    // E[f(u, v)], (u, v) ~ N(0, cov)
    template <class F>
    double expect2d(const CovPair& cov, F&& f) const {
        if (!cov.is_psd()) {
            throw std::invalid_argument("expect2d: covariance is not positive semidefinite");
        }
        if (cov.q_aa < kPointMass) {
            return expect1d(cov.q_bb, [&](double v) { return f(0.0, v); });
        }
        if (cov.q_bb < kPointMass) {
            return expect1d(cov.q_aa, [&](double u) { return f(u, 0.0); });
        }
        double rho = cov.q_ab / std::sqrt(cov.q_aa * cov.q_bb);
        rho = std::clamp(rho, -(1.0 - kRhoClamp), 1.0 - kRhoClamp);

        // u = l11 z1, v = l21 z1 + l22 z2
        const double l11 = std::sqrt(cov.q_aa);
        const double l21 = rho * std::sqrt(cov.q_bb);
        const double l22 = std::sqrt(cov.q_bb * (1.0 - rho * rho));

        const double outer_scale =
            std::min({1.0, 1.0 / l11, 1.0 / std::max(std::abs(l21), 1e-300)});
        std::vector<double> outer_bp;
        build_breakpoints(0.0, outer_scale, outer_bp);

        const double inner_scale = std::min(1.0, 1.0 / l22);
        std::vector<double> inner_bp;
        double acc = 0.0;
        integrate_panels(outer_bp, [&](double z1, double w1) {
            const double u = l11 * z1;
            const double v_base = l21 * z1;
            // v features sit at v = 0, i.e. z2 = -v_base / l22
            build_breakpoints(-v_base / l22, inner_scale, inner_bp);
            double inner = 0.0;
            integrate_panels(inner_bp, [&](double z2, double w2) {
                inner += w2 * f(u, v_base + l22 * z2);
            });
            acc += w1 * inner;
        });
        return acc;
    }

  private:
    static constexpr double kPointMass = 1e-14;
    static constexpr double kRhoClamp = 1e-12;
    static constexpr double kZMax = 13.0;

    int order_;
    std::vector<double> ref_nodes_;    // Gauss-Legendre on [-1, 1]
    std::vector<double> ref_weights_;

    void build_breakpoints(double center, double scale, std::vector<double>& bp) const;

    template <class H>
    void integrate_panels(const std::vector<double>& bp, H&& h) const {
        constexpr double inv_sqrt_2pi = 0.3989422804014326779;
        for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
            const double mid = 0.5 * (bp[p] + bp[p + 1]);
            const double half = 0.5 * (bp[p + 1] - bp[p]);
            for (int k = 0; k < order_; ++k) {
                const double z = mid + half * ref_nodes_[k];
                const double w =
                    half * ref_weights_[k] * inv_sqrt_2pi * std::exp(-0.5 * z * z);
                h(z, w);
            }
        }
    }
};

const Quadrature& default_quadrature();

// E[sigma^(f_order)(u) * sigma^(g_order)(v)] over (u, v) ~ N(0, cov).
double t_operator(const CovPair& cov, int f_order, int g_order, const Activation& act,
                  const Quadrature& quad = default_quadrature());

// Closed forms for the erf family (exact, used as oracles and fast paths):
//   erf x erf:            (2/pi) asin(q_ab / sqrt((q_aa+1/2)(q_bb+1/2)))
//   erf' x erf':          (4/pi) / sqrt((1+2q_aa)(1+2q_bb) - 4 q_ab^2)
// and for the rescaled sigmoid 0.5 erf(x/2) + 0.5:
//   s x s:                1/4 + (1/2pi) asin(q_ab / sqrt((q_aa+2)(q_bb+2)))
//   s' x s':              (1/2pi) / sqrt((q_aa+2)(q_bb+2) - q_ab^2)
double t_erf_erf(const CovPair& cov);
double t_derf_derf(const CovPair& cov);
double t_scaled_sigmoid(const CovPair& cov);
double t_scaled_sigmoid_deriv(const CovPair& cov);

}  // namespace ntkae
