#include "ntkae/finite_net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ntkae/rng.hpp"

namespace ntkae {

namespace {

constexpr char kMagic[8] = {'N', 'T', 'K', 'A', 'E', '0', '0', '1'};

Eigen::MatrixXd apply_act(const NetworkParams& p, const Eigen::MatrixXd& pre, int order) {
    return pre.unaryExpr([&](double v) { return p.act.eval(order, v); });
}

}  // namespace

std::vector<int> NetworkParams::dims() const {
    std::vector<int> d;
    d.push_back(input_dim());
    for (const auto& w : weights) d.push_back(static_cast<int>(w.rows()));
    return d;
}

NetworkParams NetworkParams::random(const std::vector<int>& dims, const Activation& act,
                                    std::uint64_t seed) {
    if (dims.size() < 2) {
        throw std::invalid_argument("NetworkParams::random: need at least two layer sizes");
    }
    NetworkParams p;
    p.act = act;
    Rng rng(rng_derive(seed, 0x6e6574));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (dims[l] < 1 || dims[l + 1] < 1) {
            throw std::invalid_argument("NetworkParams::random: layer sizes must be >= 1");
        }
        Eigen::MatrixXd w(dims[l + 1], dims[l]);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.normal();
        }
        p.weights.push_back(std::move(w));
    }
    return p;
}

ForwardTrace forward(const NetworkParams& p, const Eigen::VectorXd& x) {
    if (x.size() != p.input_dim()) {
        throw std::invalid_argument("forward: input dimension mismatch");
    }
    ForwardTrace tr;
    tr.acts.push_back(x);
    const int L = p.depth();
    for (int l = 0; l < L; ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
        Eigen::VectorXd pre = scale * (p.weights[l] * tr.acts.back());
        tr.preacts.push_back(pre);
        if (l + 1 < L) {
            tr.acts.push_back(pre.unaryExpr([&](double v) { return p.act.eval(0, v); }));
        }
    }
    return tr;
}

Eigen::MatrixXd batch_forward(const NetworkParams& p, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd a = X;
    const int L = p.depth();
    for (int l = 0; l < L; ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
        Eigen::MatrixXd pre = scale * (p.weights[l] * a);
        a = (l + 1 < L) ? apply_act(p, pre, 0) : std::move(pre);
    }
    return a;
}

Eigen::MatrixXd jacobian(const NetworkParams& p, const Eigen::VectorXd& x) {
    ForwardTrace tr = forward(p, x);
    const int L = p.depth();
    const double scale0 = 1.0 / std::sqrt(static_cast<double>(p.weights[0].cols()));
    Eigen::MatrixXd J = scale0 * p.weights[0];
    for (int l = 1; l < L; ++l) {
        const Eigen::VectorXd d =
            tr.preacts[l - 1].unaryExpr([&](double v) { return p.act.eval(1, v); });
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
        J = scale * (p.weights[l] * d.asDiagonal() * J);
    }
    return J;
}

double autoencoder_loss(const NetworkParams& p, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd R = batch_forward(p, X) - X;
    return 0.5 * R.squaredNorm() / static_cast<double>(X.cols());
}

TrainResult train(NetworkParams p, const Dataset& data, const TrainConfig& cfg) {
    if (cfg.lr <= 0.0 || cfg.threshold <= 0.0 || cfg.log_every < 1) {
        throw std::invalid_argument(
            "train: learning rate, threshold, and log interval must be positive");
    }
    if (data.n0() != p.input_dim() || data.n0() != p.output_dim()) {
        throw std::invalid_argument("train: network and data dimensions mismatch");
    }
    const int L = p.depth();
    const Eigen::MatrixXd& X = data.X;
    const double n = static_cast<double>(data.n());

    TrainResult res;
    double prev_loss = std::numeric_limits<double>::infinity();

    std::vector<Eigen::MatrixXd> pre(L), act(L);
    for (long it = 0;; ++it) {
        // forward with cached layer values
        const Eigen::MatrixXd* input = &X;
        for (int l = 0; l < L; ++l) {
            const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
            pre[l] = scale * (p.weights[l] * *input);
            if (l + 1 < L) {
                act[l] = apply_act(p, pre[l], 0);
                input = &act[l];
            }
        }
        const Eigen::MatrixXd resid = pre[L - 1] - X;
        const double loss = 0.5 * resid.squaredNorm() / n;

        if (!std::isfinite(loss)) {
            res.diverged = true;
            res.diverged_at = it;
            res.iterations = it;
            res.final_loss = loss;
            res.loss_trace.emplace_back(it, loss);
            break;
        }
        if (it % cfg.log_every == 0) res.loss_trace.emplace_back(it, loss);
        if (loss > prev_loss && res.monotone) {
            res.monotone = false;
            res.first_increase = it;
        }
        prev_loss = loss;

        if (loss < cfg.threshold) {
            res.converged = true;
            res.iterations = it;
            res.final_loss = loss;
            if (res.loss_trace.empty() || res.loss_trace.back().first != it) {
                res.loss_trace.emplace_back(it, loss);
            }
            break;
        }
        if (it >= cfg.max_iters) {
            res.iterations = it;
            res.final_loss = loss;
            break;
        }

        // backprop: g holds dLoss/d(preactivation of layer l)
        Eigen::MatrixXd g = resid / n;
        for (int l = L - 1; l >= 0; --l) {
            const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
            const Eigen::MatrixXd& below = (l == 0) ? X : act[l - 1];
            Eigen::MatrixXd grad_w = scale * (g * below.transpose());
            if (l > 0) {
                g = apply_act(p, pre[l - 1], 1).cwiseProduct(
                    scale * (p.weights[l].transpose() * g));
            }
            p.weights[l].noalias() -= cfg.lr * grad_w;
        }
    }
    res.params = std::move(p);
    return res;
}

void save_checkpoint(const NetworkParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    const auto d = p.dims();
    const std::uint32_t L = static_cast<std::uint32_t>(p.depth());
    out.write(reinterpret_cast<const char*>(&L), 4);
    for (int v : d) {
        const std::uint32_t u = static_cast<std::uint32_t>(v);
        out.write(reinterpret_cast<const char*>(&u), 4);
    }
    const std::uint8_t kind = static_cast<std::uint8_t>(p.act.kind);
    out.write(reinterpret_cast<const char*>(&kind), 1);
    out.write(reinterpret_cast<const char*>(&p.act.alpha), 8);
    out.write(reinterpret_cast<const char*>(&p.act.beta), 8);
    for (const auto& w : p.weights) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double v = w(i, j);
                out.write(reinterpret_cast<const char*>(&v), 8);
            }
        }
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

NetworkParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    }
    std::uint32_t L = 0;
    in.read(reinterpret_cast<char*>(&L), 4);
    if (!in || L == 0 || L > 64) {
        throw std::runtime_error("load_checkpoint: invalid layer count");
    }
    std::vector<std::uint32_t> dims(L + 1);
    for (auto& u : dims) in.read(reinterpret_cast<char*>(&u), 4);
    std::uint8_t kind = 0;
    double alpha = 0, beta = 0;
    in.read(reinterpret_cast<char*>(&kind), 1);
    in.read(reinterpret_cast<char*>(&alpha), 8);
    in.read(reinterpret_cast<char*>(&beta), 8);
    if (!in || kind > 4) throw std::runtime_error("load_checkpoint: invalid header");

    NetworkParams p;
    p.act = Activation{static_cast<ActKind>(kind), alpha, beta};
    for (std::uint32_t l = 0; l < L; ++l) {
        Eigen::MatrixXd w(dims[l + 1], dims[l]);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                double v;
                in.read(reinterpret_cast<char*>(&v), 8);
                w(i, j) = v;
            }
        }
        p.weights.push_back(std::move(w));
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path);
    return p;
}

}  // namespace ntkae
