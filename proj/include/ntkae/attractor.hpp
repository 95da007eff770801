#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ntkae/spectrum.hpp"

namespace ntkae {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DivergenceError : std::runtime_error {
    int iteration;
    explicit DivergenceError(int it)
        : std::runtime_error("iteration diverged to a non-finite state at step " +
                             std::to_string(it)),
          iteration(it) {}
};

struct IterationTrace {
    std::vector<Eigen::VectorXd> states;  // states.size() == iterations_used + 1
    bool converged = false;
    int iterations_used = 0;
    double final_mse = 0.0;
};

// Applies the map repeatedly; converged when the coordinate-mean squared error
// to the target drops below tol (checked after each application). Throws
// DivergenceError on a non-finite state.
IterationTrace iterate(const VectorMap& map, const Eigen::VectorXd& x0,
                       const Eigen::VectorXd& target, int max_iter = 50,
                       double tol = 1e-2);

// Sufficient condition of the fixed-point stability test:
// every eigenvalue norm strictly below 1 - margin.
inline bool is_attractor(const SpectrumReport& rep, double margin = 0.0) {
    if (margin < 0.0) throw std::invalid_argument("is_attractor: margin must be >= 0");
    return rep.largest_norm < 1.0 - margin;
}

struct BasinReport {
    double noise_radius = 0.0;
    int samples = 0;                      // per training point
    double success_rate = 0.0;            // total successes / total draws
    std::vector<double> per_point_rate;
    std::vector<int> per_point_success;
};

// For each fixed point (column), draws `samples` Gaussian perturbations
// x_i + sigma * g and counts convergence back to that same point under the
// given iteration budget. Per-draw RNG streams derive from (seed, point,
// sample), so the report is reproducible independent of evaluation order.
// Divergence counts as failure.
BasinReport basin_probe(const VectorMap& map, const Eigen::MatrixXd& fixed_points,
                        double sigma, int samples, std::uint64_t seed, int max_iter = 50,
                        double tol = 1e-2);

}  // namespace ntkae
