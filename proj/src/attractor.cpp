#include "ntkae/attractor.hpp"

#include "ntkae/rng.hpp"

namespace ntkae {

IterationTrace iterate(const VectorMap& map, const Eigen::VectorXd& x0,
                       const Eigen::VectorXd& target, int max_iter, double tol) {
    if (max_iter < 1) throw std::invalid_argument("iterate: max_iter must be >= 1");
    if (x0.size() != target.size()) {
        throw std::invalid_argument("iterate: state and target dimensions mismatch");
    }
    const double n = static_cast<double>(x0.size());

    IterationTrace tr;
    tr.states.push_back(x0);
    tr.final_mse = (x0 - target).squaredNorm() / n;
    for (int k = 1; k <= max_iter; ++k) {
        Eigen::VectorXd next = map(tr.states.back());
        if (!next.allFinite()) throw DivergenceError(k);
        tr.states.push_back(std::move(next));
        tr.iterations_used = k;
        tr.final_mse = (tr.states.back() - target).squaredNorm() / n;
        if (tr.final_mse < tol) {
            tr.converged = true;
            break;
        }
    }
    return tr;
}

BasinReport basin_probe(const VectorMap& map, const Eigen::MatrixXd& fixed_points,
                        double sigma, int samples, std::uint64_t seed, int max_iter,
                        double tol) {
    if (samples < 1) throw std::invalid_argument("basin_probe: samples must be >= 1");
    const int n = static_cast<int>(fixed_points.cols());
    const int n0 = static_cast<int>(fixed_points.rows());

    BasinReport rep;
    rep.noise_radius = sigma;
    rep.samples = samples;
    rep.per_point_success.assign(n, 0);
    rep.per_point_rate.assign(n, 0.0);

    for (int i = 0; i < n; ++i) {
        const std::uint64_t point_seed = rng_derive(seed, static_cast<std::uint64_t>(i));
        for (int s = 0; s < samples; ++s) {
            Rng rng(rng_derive(point_seed, static_cast<std::uint64_t>(s)));
            Eigen::VectorXd x0 = fixed_points.col(i);
            for (int d = 0; d < n0; ++d) x0(d) += sigma * rng.normal();
            try {
                const IterationTrace tr =
                    iterate(map, x0, fixed_points.col(i), max_iter, tol);
                if (tr.converged) ++rep.per_point_success[i];
            } catch (const DivergenceError&) {
                // counted as failure
            }
        }
        rep.per_point_rate[i] =
            static_cast<double>(rep.per_point_success[i]) / static_cast<double>(samples);
    }
    int total = 0;
    for (int c : rep.per_point_success) total += c;
    rep.success_rate = static_cast<double>(total) / static_cast<double>(n * samples);
    return rep;
}

}  // namespace ntkae
