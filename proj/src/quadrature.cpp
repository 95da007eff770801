#include "ntkae/quadrature.hpp"

#include <cmath>

namespace ntkae {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace

Quadrature::Quadrature(int order) : order_(order) {
    if (order < 2 || order > 128) {
        throw std::invalid_argument("Quadrature: order must be in 2..128");
    }
    gauss_legendre(order, ref_nodes_, ref_weights_);
}

void Quadrature::build_breakpoints(double center, double scale,
                                   std::vector<double>& bp) const {
    static const double base[] = {0.0, 0.75, 1.5, 2.25, 3.0, 4.0,
                                  5.0, 6.5,  8.0, 10.0, kZMax};
    bp.clear();
    for (double b : base) {
        bp.push_back(b);
        if (b > 0.0) bp.push_back(-b);
    }
    if (scale < 0.75) {
        double s = std::max(scale, 1e-8);
        if (std::abs(center) <= kZMax) bp.push_back(center);
        while (s < 0.75) {
            for (double c : {center - s, center + s}) {
                if (std::abs(c) < kZMax) bp.push_back(c);
            }
            s *= 2.0;
        }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [](double a, double b) { return b - a < 1e-12; }),
             bp.end());
}

const Quadrature& default_quadrature() {
    static const Quadrature quad(16);
    return quad;
}

double t_operator(const CovPair& cov, int f_order, int g_order, const Activation& act,
                  const Quadrature& quad) {
    if (f_order < 0 || f_order > 3 || g_order < 0 || g_order > 3) {
        throw std::invalid_argument("t_operator: derivative orders must be in 0..3");
    }
    if (!cov.is_psd()) {
        throw std::invalid_argument("t_operator: covariance is not positive semidefinite");
    }
    return quad.expect2d(cov, [&](double u, double v) {
        return act.eval(f_order, u) * act.eval(g_order, v);
    });
}

double t_erf_erf(const CovPair& cov) {
    const double denom = std::sqrt((cov.q_aa + 0.5) * (cov.q_bb + 0.5));
    const double a = std::clamp(cov.q_ab / denom, -1.0, 1.0);
    return (2.0 / M_PI) * std::asin(a);
}

double t_derf_derf(const CovPair& cov) {
    const double det =
        (1.0 + 2.0 * cov.q_aa) * (1.0 + 2.0 * cov.q_bb) - 4.0 * cov.q_ab * cov.q_ab;
    if (det <= 0.0) {
        throw std::invalid_argument("t_derf_derf: degenerate covariance");
    }
    return (4.0 / M_PI) / std::sqrt(det);
}

double t_scaled_sigmoid(const CovPair& cov) {
    const double denom = std::sqrt((cov.q_aa + 2.0) * (cov.q_bb + 2.0));
    const double a = std::clamp(cov.q_ab / denom, -1.0, 1.0);
    return 0.25 + (0.5 / M_PI) * std::asin(a);
}

double t_scaled_sigmoid_deriv(const CovPair& cov) {
    const double det = (cov.q_aa + 2.0) * (cov.q_bb + 2.0) - cov.q_ab * cov.q_ab;
    if (det <= 0.0) {
        throw std::invalid_argument("t_scaled_sigmoid_deriv: degenerate covariance");
    }
    return (0.5 / M_PI) / std::sqrt(det);
}

}  // namespace ntkae
