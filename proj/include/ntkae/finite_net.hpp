#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ntkae/activation.hpp"
#include "ntkae/dataset.hpp"

namespace ntkae {

// Fully connected net f(x) = W^(L-1)/sqrt(n_{L-1}) sigma(... sigma(W^(0) x / sqrt(n_0)))
// with standard-Gaussian weight initialization and a linear output layer.
// weights[l] maps layer l (size dims[l]) to layer l+1.
struct NetworkParams {
    std::vector<Eigen::MatrixXd> weights;
    Activation act;

    int depth() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return static_cast<int>(weights.front().cols()); }
    int output_dim() const { return static_cast<int>(weights.back().rows()); }
    std::vector<int> dims() const;

    static NetworkParams random(const std::vector<int>& dims, const Activation& act,
                                std::uint64_t seed);
};

struct ForwardTrace {
    std::vector<Eigen::VectorXd> preacts;  // alpha~^(1..L)
    std::vector<Eigen::VectorXd> acts;     // alpha^(0..L-1)
    const Eigen::VectorXd& output() const { return preacts.back(); }
};

ForwardTrace forward(const NetworkParams& p, const Eigen::VectorXd& x);
Eigen::MatrixXd batch_forward(const NetworkParams& p, const Eigen::MatrixXd& X);

// Exact input-output Jacobian from the cached preactivations:
// J = W^(L-1)/sqrt(n_{L-1}) * prod_k D^(k) W^(k-1)/sqrt(n_{k-1}).
Eigen::MatrixXd jacobian(const NetworkParams& p, const Eigen::VectorXd& x);

// Mean-squared autoencoding loss (1/2n) sum_i |f(x_i) - x_i|^2.
double autoencoder_loss(const NetworkParams& p, const Eigen::MatrixXd& X);

struct TrainConfig {
    double lr = 1.0;
    double threshold = 1e-7;
    long max_iters = 500000;
    std::uint64_t seed = 0;   // initialization seed, recorded with results
    long log_every = 100;
};

struct TrainResult {
    NetworkParams params;
    std::vector<std::pair<long, double>> loss_trace;
    bool converged = false;
    long iterations = 0;
    double final_loss = 0.0;
    bool diverged = false;
    long diverged_at = -1;
    bool monotone = true;
    long first_increase = -1;
};

// Full-batch vanilla gradient descent, deterministic given the initial params.
TrainResult train(NetworkParams p, const Dataset& data, const TrainConfig& cfg);

// Checkpoint layout (little-endian): magic "NTKAE001", u32 weight count L,
// u32 dims[L+1], u8 activation kind, f64 alpha, f64 beta, then each weight
// matrix as row-major f64.
void save_checkpoint(const NetworkParams& p, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

}  // namespace ntkae
