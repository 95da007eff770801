// Command-line harness: kernel inspection, finite-width training, spectrum
// and basin probes of trained nets, the verification battery, and the
// experiment grids with CSV/JSON output.
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "ntkae/attractor.hpp"
#include "ntkae/experiments.hpp"
#include "ntkae/finite_net.hpp"
#include "ntkae/idx.hpp"
#include "ntkae/regression.hpp"
#include "ntkae/rng.hpp"
#include "ntkae/spectrum.hpp"
#include "ntkae/theory_checks.hpp"

using namespace ntkae;

namespace {

struct OutputOpts {
    std::string out = "-";
    std::string format = "csv";
};

void add_output_opts(CLI::App* cmd, OutputOpts& opts) {
    cmd->add_option("--out", opts.out, "output path, '-' for stdout");
    cmd->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const ResultTable& table, const OutputOpts& opts) {
    std::ostringstream buf;
    if (opts.format == "json") {
        write_json(table, buf);
    } else {
        write_csv(table, buf);
    }
    if (opts.out == "-") {
        std::cout << buf.str();
    } else {
        std::ofstream f(opts.out);
        if (!f) throw std::runtime_error("cannot open output file " + opts.out);
        f << buf.str();
    }
}

struct DataOpts {
    int n0 = 32;
    int n = 5;
    double r = 0.0;  // 0 -> sqrt(n0)
    std::uint64_t data_seed = 1;
    double max_cos = 1.0;
    std::string idx_path;
    int images = 10;
    int offset = 0;
};

void add_data_opts(CLI::App* cmd, DataOpts& opts) {
    cmd->add_option("--n0", opts.n0, "input dimension (synthetic data)");
    cmd->add_option("--n", opts.n, "number of training points (synthetic data)");
    cmd->add_option("--r", opts.r, "common input norm, default sqrt(n0)");
    cmd->add_option("--data-seed", opts.data_seed, "seed for synthetic data");
    cmd->add_option("--max-cos", opts.max_cos, "reject pairs with |cosine| above this");
    cmd->add_option("--idx", opts.idx_path, "IDX image file instead of synthetic data");
    cmd->add_option("--images", opts.images, "image count when reading IDX");
    cmd->add_option("--offset", opts.offset, "image offset when reading IDX");
}

Dataset make_dataset(const DataOpts& opts) {
    double r = opts.r > 0.0 ? opts.r : std::sqrt(static_cast<double>(opts.n0));
    if (!opts.idx_path.empty()) {
        return Dataset::from_columns(read_idx(opts.idx_path, r, opts.images, opts.offset).X);
    }
    Rng rng(rng_derive(opts.data_seed, 0xda7a));
    return random_dataset(opts.n0, opts.n, r, rng, opts.max_cos);
}

int cmd_kernel(const DataOpts& data_opts, int depth, const std::string& act_name,
               const OutputOpts& out_opts) {
    const Dataset data = make_dataset(data_opts);
    const KernelSystem ks = build_kernel_system(data, depth, activation_from_name(act_name));
    ResultTable t;
    t.schema = "ntkae.kernel v1";
    t.seed = data_opts.data_seed;
    t.columns = {"i", "j", "value", "jitter", "condition"};
    for (int i = 0; i < ks.K.rows(); ++i) {
        for (int j = 0; j < ks.K.cols(); ++j) {
            t.rows.push_back({static_cast<long long>(i), static_cast<long long>(j),
                              ks.K(i, j), ks.jitter, ks.condition});
        }
    }
    emit(t, out_opts);
    return 0;
}

int cmd_train(const DataOpts& data_opts, int width, int depth,
              const std::string& act_name, TrainConfig tc, const std::string& ckpt,
              const OutputOpts& out_opts) {
    const Dataset data = make_dataset(data_opts);
    std::vector<int> dims(depth + 1, width);
    dims.front() = data.n0();
    dims.back() = data.n0();
    const NetworkParams init =
        NetworkParams::random(dims, activation_from_name(act_name), tc.seed);
    const TrainResult res = train(init, data, tc);

    ResultTable t;
    t.schema = "ntkae.train v1";
    t.seed = tc.seed;
    t.columns = {"iteration", "loss", "converged", "diverged", "final"};
    for (std::size_t i = 0; i < res.loss_trace.size(); ++i) {
        const bool last = i + 1 == res.loss_trace.size();
        t.rows.push_back({static_cast<long long>(res.loss_trace[i].first),
                          res.loss_trace[i].second, last && res.converged,
                          last && res.diverged, last});
    }
    emit(t, out_opts);
    if (!ckpt.empty()) save_checkpoint(res.params, ckpt);
    std::cerr << "train: loss " << res.final_loss << " after " << res.iterations
              << " iterations, " << (res.converged ? "converged" : "not converged")
              << "\n";
    return res.diverged ? 1 : 0;
}

int cmd_spectrum(const DataOpts& data_opts, const std::string& ckpt, double window,
                 const OutputOpts& out_opts) {
    const Dataset data = make_dataset(data_opts);
    const NetworkParams p = load_checkpoint(ckpt);
    ResultTable t;
    t.schema = "ntkae.spectrum v1";
    t.seed = data_opts.data_seed;
    t.columns = {"point",       "eig_index",     "re", "im", "norm",
                 "largest_norm", "operator_norm", "count_near_one", "is_attractor"};
    for (int i = 0; i < data.n(); ++i) {
        const SpectrumReport rep = spectrum(jacobian(p, data.X.col(i)), window);
        for (int e = 0; e < rep.eigenvalues.size(); ++e) {
            t.rows.push_back({static_cast<long long>(i), static_cast<long long>(e),
                              rep.eigenvalues(e).real(), rep.eigenvalues(e).imag(),
                              std::abs(rep.eigenvalues(e)), rep.largest_norm,
                              rep.operator_norm,
                              static_cast<long long>(rep.count_near_one),
                              is_attractor(rep)});
        }
    }
    emit(t, out_opts);
    return 0;
}

int cmd_basin(const DataOpts& data_opts, const std::string& ckpt,
              std::vector<double> sigmas, int samples, std::uint64_t seed, int max_iter,
              double tol, const OutputOpts& out_opts) {
    const Dataset data = make_dataset(data_opts);
    const auto p = std::make_shared<NetworkParams>(load_checkpoint(ckpt));
    const VectorMap map = [p](const Eigen::VectorXd& x) {
        return forward(*p, x).output();
    };
    if (sigmas.empty()) sigmas = {0.0, 0.05 * data.r, 0.1 * data.r};
    ResultTable t;
    t.schema = "ntkae.basin v1";
    t.seed = seed;
    t.columns = {"sigma", "point", "successes", "samples", "rate", "overall_rate"};
    for (double sigma : sigmas) {
        const BasinReport rep = basin_probe(map, data.X, sigma, samples, seed, max_iter, tol);
        for (int i = 0; i < data.n(); ++i) {
            t.rows.push_back({sigma, static_cast<long long>(i),
                              static_cast<long long>(rep.per_point_success[i]),
                              static_cast<long long>(samples), rep.per_point_rate[i],
                              rep.success_rate});
        }
    }
    emit(t, out_opts);
    return 0;
}

int cmd_verify(std::uint64_t seed, bool quick, const OutputOpts& out_opts) {
    const auto records = checks::run_verification_battery(seed, quick);
    ResultTable t;
    t.schema = "ntkae.verify v1";
    t.seed = seed;
    t.columns = {"name", "observed", "predicted", "tolerance", "pass", "hard", "note"};
    int hard_failures = 0;
    for (const auto& rec : records) {
        t.rows.push_back({rec.name, rec.observed, rec.predicted, rec.tolerance, rec.pass,
                          rec.hard, rec.note});
        if (rec.hard && !rec.pass) ++hard_failures;
    }
    emit(t, out_opts);
    std::cerr << "verify: " << records.size() << " checks, " << hard_failures
              << " hard failure(s)\n";
    return hard_failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NTK autoencoder attractor toolkit"};
    app.require_subcommand(1);

    // kernel
    DataOpts kernel_data;
    int kernel_depth = 2;
    std::string kernel_act = "erf_scaled_sigmoid";
    OutputOpts kernel_out;
    auto* kernel = app.add_subcommand("kernel", "assemble the Gram matrix of the limit kernel");
    add_data_opts(kernel, kernel_data);
    kernel->add_option("--depth", kernel_depth, "network depth (weight layers)");
    kernel->add_option("--act", kernel_act, "activation name");
    add_output_opts(kernel, kernel_out);

    // train
    DataOpts train_data;
    int train_width = 1000, train_depth = 2;
    std::string train_act = "sigmoid", train_ckpt;
    TrainConfig tc;
    OutputOpts train_out;
    auto* train_cmd = app.add_subcommand("train", "full-batch gradient descent training");
    add_data_opts(train_cmd, train_data);
    train_cmd->add_option("--width", train_width, "hidden width");
    train_cmd->add_option("--depth", train_depth, "network depth (weight layers)");
    train_cmd->add_option("--act", train_act, "activation name");
    train_cmd->add_option("--lr", tc.lr, "learning rate");
    train_cmd->add_option("--threshold", tc.threshold, "loss threshold");
    train_cmd->add_option("--max-iters", tc.max_iters, "iteration budget");
    train_cmd->add_option("--seed", tc.seed, "initialization seed");
    train_cmd->add_option("--checkpoint-out", train_ckpt, "checkpoint output path");
    add_output_opts(train_cmd, train_out);

    // spectrum
    DataOpts spec_data;
    std::string spec_ckpt;
    double spec_window = 1e-3;
    OutputOpts spec_out;
    auto* spec = app.add_subcommand("spectrum", "Jacobian spectra at the training points");
    add_data_opts(spec, spec_data);
    spec->add_option("--checkpoint", spec_ckpt, "trained checkpoint")->required();
    spec->add_option("--window", spec_window, "near-one window");
    add_output_opts(spec, spec_out);

    // basin
    DataOpts basin_data;
    std::string basin_ckpt;
    std::vector<double> basin_sigmas;
    int basin_samples = 100, basin_iters = 50;
    double basin_tol = 1e-2;
    std::uint64_t basin_seed = 1;
    OutputOpts basin_out;
    auto* basin = app.add_subcommand("basin", "Gaussian-perturbation basin probe");
    add_data_opts(basin, basin_data);
    basin->add_option("--checkpoint", basin_ckpt, "trained checkpoint")->required();
    basin->add_option("--sigma", basin_sigmas, "noise radii (repeatable)");
    basin->add_option("--samples", basin_samples, "draws per training point");
    basin->add_option("--max-iter", basin_iters, "iteration budget per draw");
    basin->add_option("--tol", basin_tol, "convergence MSE threshold");
    basin->add_option("--seed", basin_seed, "noise seed");
    add_output_opts(basin, basin_out);

    // verify
    std::uint64_t verify_seed = 1;
    bool verify_quick = false;
    OutputOpts verify_out;
    auto* verify = app.add_subcommand("verify", "run the verification battery");
    verify->add_option("--seed", verify_seed, "battery seed");
    verify->add_flag("--quick", verify_quick, "reduced sizes");
    add_output_opts(verify, verify_out);

    // experiment
    std::string exp_id, exp_config;
    ExperimentConfig cfg;
    bool cfg_quick = false;
    OutputOpts exp_out;
    auto* exp = app.add_subcommand("experiment", "run a named experiment grid");
    exp->add_option("id", exp_id, "experiment id")->required();
    exp->add_option("--config", exp_config, "key=value config file");
    exp->add_option("--seed", cfg.seed, "master seed");
    exp->add_option("--reps", cfg.repetitions, "repetitions per cell");
    exp->add_option("--n0", cfg.n0, "input dimension");
    exp->add_option("--n", cfg.n, "training points");
    exp->add_option("--act", cfg.act, "activation name");
    exp->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    exp->add_option("--idx", cfg.idx_path, "IDX path (mnist_basin)");
    exp->add_option("--images", cfg.image_count, "image count (mnist_basin)");
    exp->add_flag("--quick", cfg_quick, "reduced sizes (verify_all)");
    add_output_opts(exp, exp_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernel->parsed()) {
            return cmd_kernel(kernel_data, kernel_depth, kernel_act, kernel_out);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_data, train_width, train_depth, train_act, tc,
                             train_ckpt, train_out);
        }
        if (spec->parsed()) {
            return cmd_spectrum(spec_data, spec_ckpt, spec_window, spec_out);
        }
        if (basin->parsed()) {
            return cmd_basin(basin_data, basin_ckpt, basin_sigmas, basin_samples,
                             basin_seed, basin_iters, basin_tol, basin_out);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_seed, verify_quick, verify_out);
        }
        if (exp->parsed()) {
            ExperimentConfig final_cfg;
            if (!exp_config.empty()) {
                apply_config(final_cfg, parse_config_file(exp_config));
            }
            // command-line flags override the config file
            if (exp->count("--seed")) final_cfg.seed = cfg.seed;
            if (exp->count("--reps")) final_cfg.repetitions = cfg.repetitions;
            if (exp->count("--n0")) final_cfg.n0 = cfg.n0;
            if (exp->count("--n")) final_cfg.n = cfg.n;
            if (exp->count("--act")) final_cfg.act = cfg.act;
            if (exp->count("--threads")) final_cfg.threads = cfg.threads;
            if (exp->count("--idx")) final_cfg.idx_path = cfg.idx_path;
            if (exp->count("--images")) final_cfg.image_count = cfg.image_count;
            if (cfg_quick) final_cfg.quick = true;
            final_cfg.id = experiment_from_name(exp_id);
            const ResultTable table = run_experiment(final_cfg);
            emit(table, exp_out);
            if (final_cfg.id == ExperimentId::verify_all) {
                for (const auto& row : table.rows) {
                    if (std::get<bool>(row[5]) && !std::get<bool>(row[4])) return 1;
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
