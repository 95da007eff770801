#include "ntkae/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ntkae/attractor.hpp"
#include "ntkae/finite_net.hpp"
#include "ntkae/idx.hpp"
#include "ntkae/regression.hpp"
#include "ntkae/rng.hpp"
#include "ntkae/spectrum.hpp"
#include "ntkae/theory_checks.hpp"

namespace ntkae {

namespace {

struct NameId {
    const char* name;
    ExperimentId id;
};

constexpr NameId kIds[] = {
    {"depth_single", ExperimentId::depth_single},
    {"linear_hist", ExperimentId::linear_hist},
    {"radius_curve", ExperimentId::radius_curve},
    {"basin_curve", ExperimentId::basin_curve},
    {"mnist_basin", ExperimentId::mnist_basin},
    {"activation_compare", ExperimentId::activation_compare},
    {"verify_all", ExperimentId::verify_all},
};

// Runs cells 0..count-1 on a small pool; results land in per-cell buffers so
// the merged output is independent of scheduling.
template <class F>
void for_each_cell(int count, int threads, F&& body) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int c = 0; c < count; ++c) body(c);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int c = next.fetch_add(1); c < count; c = next.fetch_add(1)) body(c);
        });
    }
    for (auto& th : pool) th.join();
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw std::invalid_argument("experiment config: " + field + " " + why);
}

// trained Jacobian summary at the training points
struct NetSpectra {
    double lambda_max = 0.0;
    double op_norm_max = 0.0;
};

NetSpectra spectra_at_points(const NetworkParams& p, const Eigen::MatrixXd& X) {
    NetSpectra s;
    for (int i = 0; i < X.cols(); ++i) {
        const SpectrumReport rep = spectrum(jacobian(p, X.col(i)));
        s.lambda_max = std::max(s.lambda_max, rep.largest_norm);
        s.op_norm_max = std::max(s.op_norm_max, rep.operator_norm);
    }
    return s;
}

using Row = std::vector<Value>;

std::string seed_str(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

ExperimentId experiment_from_name(const std::string& name) {
    for (const auto& e : kIds) {
        if (name == e.name) return e.id;
    }
    throw std::invalid_argument("unknown experiment id: " + name);
}

const char* experiment_name(ExperimentId id) {
    for (const auto& e : kIds) {
        if (id == e.id) return e.name;
    }
    return "unknown";
}

void ExperimentConfig::finalize() {
    require(n0 >= 1, "n0", "must be >= 1");
    require(n >= 1, "n", "must be >= 1");
    require(repetitions >= 1, "repetitions", "must be >= 1");
    require(lr > 0.0, "lr", "must be > 0");
    require(threshold > 0.0, "threshold", "must be > 0");
    require(max_iters >= 1, "max_iters", "must be >= 1");
    require(basin_samples >= 1, "basin_samples", "must be >= 1");
    if (r == 0.0) {
        // the linear-region histogram protocol uses unit-norm inputs
        r = (id == ExperimentId::linear_hist) ? 1.0
                                              : std::sqrt(static_cast<double>(n0));
    }
    require(r > 0.0, "r", "must be > 0");

    switch (id) {
        case ExperimentId::depth_single:
            if (depth_grid.empty()) depth_grid = {2, 3, 4};
            if (width_grid.empty()) width_grid = {1000};
            break;
        case ExperimentId::linear_hist:
            if (n_grid.empty()) n_grid = {2, 5, 8};
            if (width_grid.empty()) width_grid = {1000};
            break;
        case ExperimentId::radius_curve:
            if (r_grid.empty()) r_grid = {1, 5, 10, 20, 50, 100, 200};
            if (width_grid.empty()) width_grid = {2000};
            break;
        case ExperimentId::basin_curve:
            if (r_grid.empty()) r_grid = {2, 5, 10, 20};
            if (sigma_grid.empty()) sigma_grid = {0.0, 0.5, 1.0, 2.0};
            if (width_grid.empty()) width_grid = {10000};
            break;
        case ExperimentId::mnist_basin:
            require(!idx_path.empty(), "idx_path", "is required for mnist_basin");
            require(image_count >= 1, "image_count", "must be >= 1");
            require(image_offset >= 0, "image_offset", "must be >= 0");
            if (r_grid.empty()) r_grid = {100, 300, 1000};
            // pixel-space noise: |noise| ~ sigma * 28, so these span gentle to
            // severe perturbations across the default radius grid
            if (sigma_grid.empty()) sigma_grid = {0.0, 1.0, 3.0};
            if (width_grid.empty()) width_grid = {10000};
            break;
        case ExperimentId::activation_compare:
            if (act_grid.empty()) act_grid = {"sigmoid", "erf_scaled_sigmoid", "erf", "tanh"};
            if (r_grid.empty()) r_grid = {1, 5, 10, 20, 50};
            if (width_grid.empty()) width_grid = {2000};
            break;
        case ExperimentId::verify_all:
            break;
    }
    for (double v : r_grid) require(v > 0.0, "r_grid", "entries must be > 0");
    for (int v : width_grid) require(v >= 1, "width_grid", "entries must be >= 1");
    for (int v : depth_grid) require(v >= 2, "depth_grid", "entries must be >= 2");
    for (int v : n_grid) require(v >= 1, "n_grid", "entries must be >= 1");
    for (double v : sigma_grid) require(v >= 0.0, "sigma_grid", "entries must be >= 0");
}

namespace {

ResultTable run_depth_single(const ExperimentConfig& cfg) {
    ResultTable t;
    t.schema = "ntkae.depth_single v1";
    t.seed = cfg.seed;
    t.columns = {"depth",     "width",     "rep",   "cell_seed", "r",
                 "loss",      "iterations", "converged", "filtered",  "lambda0",
                 "lambda_inf", "abs_diff"};
    const int cells = static_cast<int>(cfg.depth_grid.size() * cfg.width_grid.size()) *
                      cfg.repetitions;
    std::vector<std::vector<Row>> buf(cells);
    for_each_cell(cells, cfg.threads, [&](int c) {
        const int per_depth = static_cast<int>(cfg.width_grid.size()) * cfg.repetitions;
        const int depth = cfg.depth_grid[c / per_depth];
        const int width = cfg.width_grid[(c % per_depth) / cfg.repetitions];
        const int rep = c % cfg.repetitions;
        const std::uint64_t cell_seed = rng_derive(cfg.seed, static_cast<std::uint64_t>(c));
        Rng rng(cell_seed);
        const Dataset data = random_dataset(cfg.n0, 1, cfg.r, rng);

        std::vector<int> dims(depth + 1, width);
        dims.front() = cfg.n0;
        dims.back() = cfg.n0;
        const NetworkParams init =
            NetworkParams::random(dims, Activation::sigmoid(), rng.next_u64());
        const double l0 = spectrum(jacobian(init, data.X.col(0))).largest_norm;

        TrainConfig tc;
        tc.lr = cfg.lr;
        tc.threshold = cfg.threshold;
        tc.max_iters = cfg.max_iters;
        tc.seed = cell_seed;
        const TrainResult res = train(init, data, tc);
        const double linf =
            spectrum(jacobian(res.params, data.X.col(0))).largest_norm;
        buf[c].push_back(Row{static_cast<long long>(depth), static_cast<long long>(width),
                             static_cast<long long>(rep),
                             seed_str(cell_seed), cfg.r, res.final_loss,
                             static_cast<long long>(res.iterations), res.converged,
                             !res.converged, l0, linf, std::abs(l0 - linf)});
    });
    for (auto& rows : buf) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

ResultTable run_linear_hist(const ExperimentConfig& cfg) {
    ResultTable t;
    t.schema = "ntkae.linear_hist v1";
    t.seed = cfg.seed;
    t.columns = {"n",         "width",    "rep",      "cell_seed", "r",
                 "loss",      "converged", "filtered", "eig_index", "eig_re",
                 "eig_im",    "eig_norm", "near_one_count", "near_one_window"};
    const int cells =
        static_cast<int>(cfg.n_grid.size() * cfg.width_grid.size()) * cfg.repetitions;
    std::vector<std::vector<Row>> buf(cells);
    for_each_cell(cells, cfg.threads, [&](int c) {
        const int per_n = static_cast<int>(cfg.width_grid.size()) * cfg.repetitions;
        const int n = cfg.n_grid[c / per_n];
        const int width = cfg.width_grid[(c % per_n) / cfg.repetitions];
        const int rep = c % cfg.repetitions;
        const std::uint64_t cell_seed = rng_derive(cfg.seed, static_cast<std::uint64_t>(c));
        Rng rng(cell_seed);
        const Dataset data = random_dataset(cfg.n0, n, cfg.r, rng);
        const NetworkParams init = NetworkParams::random(
            {cfg.n0, width, cfg.n0}, Activation::sigmoid(), rng.next_u64());
        TrainConfig tc;
        tc.lr = cfg.lr;
        tc.threshold = cfg.threshold;
        tc.max_iters = cfg.max_iters;
        tc.seed = cell_seed;
        const TrainResult res = train(init, data, tc);
        // finite-width clusters spread like 1/sqrt(width); the tight analytic
        // window would miss them
        const double window = 0.05;
        const SpectrumReport rep_sp = spectrum(jacobian(res.params, data.X.col(0)), window);
        for (int e = 0; e < rep_sp.eigenvalues.size(); ++e) {
            buf[c].push_back(Row{
                static_cast<long long>(n), static_cast<long long>(width),
                static_cast<long long>(rep), seed_str(cell_seed), cfg.r,
                res.final_loss, res.converged, !res.converged, static_cast<long long>(e),
                rep_sp.eigenvalues(e).real(), rep_sp.eigenvalues(e).imag(),
                std::abs(rep_sp.eigenvalues(e)),
                static_cast<long long>(rep_sp.count_near_one), window});
        }
    });
    for (auto& rows : buf) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

void append_finite_row(std::vector<Row>& rows, double r, long long width,
                       long long rep, std::uint64_t cell_seed, const TrainResult& res,
                       const NetSpectra& sp) {
    rows.push_back(Row{r, width, std::string("finite"), rep,
                       seed_str(cell_seed), res.final_loss,
                       static_cast<long long>(res.iterations), res.converged,
                       !res.converged, sp.lambda_max, sp.op_norm_max});
}

ResultTable run_radius_curve(const ExperimentConfig& cfg) {
    ResultTable t;
    t.schema = "ntkae.radius_curve v1";
    t.seed = cfg.seed;
    t.columns = {"r",    "width",      "mode",      "rep",      "cell_seed", "loss",
                 "iterations", "converged", "filtered", "lambda_max", "op_norm_max"};
    const Activation act = activation_from_name(cfg.act);
    const int widths = static_cast<int>(cfg.width_grid.size());
    const int cells = static_cast<int>(cfg.r_grid.size()) * (widths + 1) * cfg.repetitions;
    std::vector<std::vector<Row>> buf(cells);
    for_each_cell(cells, cfg.threads, [&](int c) {
        const int per_r = (widths + 1) * cfg.repetitions;
        const double r = cfg.r_grid[c / per_r];
        const int slot = (c % per_r) / cfg.repetitions;  // 0 = ntk, else width index+1
        const int rep = c % cfg.repetitions;
        const std::uint64_t cell_seed = rng_derive(cfg.seed, static_cast<std::uint64_t>(c));
        // the dataset seed depends only on (r, rep) so ntk and finite rows of a
        // repetition share data
        const std::uint64_t data_seed =
            rng_derive(cfg.seed, 0xda7aull + 1000003ull * (c / per_r) +
                                     static_cast<std::uint64_t>(rep));
        Rng drng(data_seed);
        const Dataset data = random_dataset(cfg.n0, cfg.n, r, drng);

        if (slot == 0) {
            const KernelSystem ks = build_kernel_system(data, cfg.depth, act);
            double lambda_max = 0.0, op_max = 0.0;
            for (int i = 0; i < data.n(); ++i) {
                const Eigen::MatrixXd j =
                    jacobian_infinity(data, ks, InitSurrogate::zero(), data.X.col(i));
                const SpectrumReport sp = spectrum(j);
                lambda_max = std::max(lambda_max, sp.largest_norm);
                op_max = std::max(op_max, sp.operator_norm);
            }
            buf[c].push_back(Row{r, 0ll, std::string("ntk"),
                                 static_cast<long long>(rep),
                                 seed_str(cell_seed), 0.0, 0ll, true, false,
                                 lambda_max, op_max});
        } else {
            const int width = cfg.width_grid[slot - 1];
            Rng rng(cell_seed);
            const NetworkParams init =
                NetworkParams::random({cfg.n0, width, cfg.n0}, act, rng.next_u64());
            TrainConfig tc;
            tc.lr = cfg.lr;
            tc.threshold = cfg.threshold;
            tc.max_iters = cfg.max_iters;
            tc.seed = cell_seed;
            const TrainResult res = train(init, data, tc);
            append_finite_row(buf[c], r, width, rep, cell_seed, res,
                              spectra_at_points(res.params, data.X));
        }
    });
    for (auto& rows : buf) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

ResultTable run_basin(const ExperimentConfig& cfg, bool mnist) {
    ResultTable t;
    t.schema = mnist ? "ntkae.mnist_basin v1" : "ntkae.basin_curve v1";
    t.seed = cfg.seed;
    t.columns = {"r",         "width", "sigma", "rep",        "cell_seed",
                 "loss",      "iterations", "converged", "filtered",   "success_rate",
                 "min_point_rate", "max_point_rate"};
    const Activation act = activation_from_name(cfg.act);
    const int widths = static_cast<int>(cfg.width_grid.size());
    const int cells = static_cast<int>(cfg.r_grid.size()) * widths * cfg.repetitions;
    std::vector<std::vector<Row>> buf(cells);
    for_each_cell(cells, cfg.threads, [&](int c) {
        const int per_r = widths * cfg.repetitions;
        const double r = cfg.r_grid[c / per_r];
        const int width = cfg.width_grid[(c % per_r) / cfg.repetitions];
        const int rep = c % cfg.repetitions;
        const std::uint64_t cell_seed = rng_derive(cfg.seed, static_cast<std::uint64_t>(c));
        Rng rng(cell_seed);
        Dataset data = mnist ? Dataset::from_columns(
                                   read_idx(cfg.idx_path, r, cfg.image_count,
                                            cfg.image_offset)
                                       .X)
                             : random_dataset(cfg.n0, cfg.n, r, rng);
        const NetworkParams init = NetworkParams::random(
            {data.n0(), width, data.n0()}, act, rng.next_u64());
        TrainConfig tc;
        tc.lr = cfg.lr;
        tc.threshold = cfg.threshold;
        tc.max_iters = cfg.max_iters;
        tc.seed = cell_seed;
        const TrainResult res = train(init, data, tc);
        const VectorMap map = [&res](const Eigen::VectorXd& x) {
            return forward(res.params, x).output();
        };
        for (double sigma : cfg.sigma_grid) {
            const BasinReport br =
                basin_probe(map, data.X, sigma, cfg.basin_samples, rng_derive(cell_seed, 1));
            double lo = 1.0, hi = 0.0;
            for (double v : br.per_point_rate) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            buf[c].push_back(Row{r, static_cast<long long>(width), sigma,
                                 static_cast<long long>(rep),
                                 seed_str(cell_seed), res.final_loss,
                                 static_cast<long long>(res.iterations), res.converged,
                                 !res.converged, br.success_rate, lo, hi});
        }
    });
    for (auto& rows : buf) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

ResultTable run_activation_compare(const ExperimentConfig& cfg) {
    ResultTable t;
    t.schema = "ntkae.activation_compare v1";
    t.seed = cfg.seed;
    t.columns = {"act",  "r",          "width",     "rep",      "cell_seed", "loss",
                 "iterations", "converged", "filtered", "lambda_max", "op_norm_max"};
    const int widths = static_cast<int>(cfg.width_grid.size());
    const int per_act = static_cast<int>(cfg.r_grid.size()) * widths * cfg.repetitions;
    const int cells = static_cast<int>(cfg.act_grid.size()) * per_act;
    std::vector<std::vector<Row>> buf(cells);
    for_each_cell(cells, cfg.threads, [&](int c) {
        const std::string act_name = cfg.act_grid[c / per_act];
        const int rem = c % per_act;
        const int per_r = widths * cfg.repetitions;
        const double r = cfg.r_grid[rem / per_r];
        const int width = cfg.width_grid[(rem % per_r) / cfg.repetitions];
        const int rep = rem % cfg.repetitions;
        const Activation act = activation_from_name(act_name);
        const std::uint64_t cell_seed = rng_derive(cfg.seed, static_cast<std::uint64_t>(c));
        Rng rng(cell_seed);
        const Dataset data = random_dataset(cfg.n0, cfg.n, r, rng);
        const NetworkParams init =
            NetworkParams::random({cfg.n0, width, cfg.n0}, act, rng.next_u64());
        TrainConfig tc;
        tc.lr = cfg.lr;
        tc.threshold = cfg.threshold;
        tc.max_iters = cfg.max_iters;
        tc.seed = cell_seed;
        const TrainResult res = train(init, data, tc);
        const NetSpectra sp = spectra_at_points(res.params, data.X);
        buf[c].push_back(Row{act_name, r, static_cast<long long>(width),
                             static_cast<long long>(rep),
                             seed_str(cell_seed), res.final_loss,
                             static_cast<long long>(res.iterations), res.converged,
                             !res.converged, sp.lambda_max, sp.op_norm_max});
    });
    for (auto& rows : buf) {
        for (auto& r : rows) t.rows.push_back(std::move(r));
    }
    return t;
}

ResultTable run_verify_all(const ExperimentConfig& cfg) {
    ResultTable t;
    t.schema = "ntkae.verify v1";
    t.seed = cfg.seed;
    t.columns = {"name", "observed", "predicted", "tolerance", "pass", "hard", "note"};
    for (const auto& rec : checks::run_verification_battery(cfg.seed, cfg.quick)) {
        t.rows.push_back(Row{rec.name, rec.observed, rec.predicted, rec.tolerance,
                             rec.pass, rec.hard, rec.note});
    }
    return t;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    cfg.finalize();
    switch (cfg.id) {
        case ExperimentId::depth_single: return run_depth_single(cfg);
        case ExperimentId::linear_hist: return run_linear_hist(cfg);
        case ExperimentId::radius_curve: return run_radius_curve(cfg);
        case ExperimentId::basin_curve: return run_basin(cfg, false);
        case ExperimentId::mnist_basin: return run_basin(cfg, true);
        case ExperimentId::activation_compare: return run_activation_compare(cfg);
        case ExperimentId::verify_all: return run_verify_all(cfg);
    }
    throw std::logic_error("run_experiment: unknown id");
}

namespace {

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
    if (std::holds_alternative<double>(v)) return fmt_double(std::get<double>(v));
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    return std::get<std::string>(v);
}

}  // namespace

namespace {

std::string csv_field(const Value& v) {
    std::string s = value_to_string(v);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

void write_csv(const ResultTable& table, std::ostream& out) {
    out << "# schema=" << table.schema << " seed=" << table.seed << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
    }
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << csv_field(row[i]) << (i + 1 < row.size() ? "," : "\n");
        }
    }
}

void write_json(const ResultTable& table, std::ostream& out) {
    out << "{\n  \"schema\": \"" << table.schema << "\",\n  \"seed\": " << table.seed
        << ",\n  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << "    {";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << "\"" << table.columns[i] << "\": ";
            const Value& v = table.rows[r][i];
            if (std::holds_alternative<std::string>(v)) {
                out << '"';
                for (char c : std::get<std::string>(v)) {
                    if (c == '"' || c == '\\') out << '\\';
                    out << c;
                }
                out << '"';
            } else {
                out << value_to_string(v);
            }
            if (i + 1 < table.columns.size()) out << ", ";
        }
        out << (r + 1 < table.rows.size() ? "},\n" : "}\n");
    }
    out << "  ]\n}\n";
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        }
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(conv(item));
    }
    return out;
}

double to_double(const std::string& s) { return std::stod(s); }
int to_int(const std::string& s) { return std::stoi(s); }
std::string to_string_id(const std::string& s) { return s; }

}  // namespace

void apply_config(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "experiment") cfg.id = experiment_from_name(val);
        else if (key == "n0") cfg.n0 = to_int(val);
        else if (key == "n") cfg.n = to_int(val);
        else if (key == "depth") cfg.depth = to_int(val);
        else if (key == "act") cfg.act = val;
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "repetitions") cfg.repetitions = to_int(val);
        else if (key == "r") cfg.r = to_double(val);
        else if (key == "r_grid") cfg.r_grid = parse_list<double>(val, to_double);
        else if (key == "width_grid") cfg.width_grid = parse_list<int>(val, to_int);
        else if (key == "depth_grid") cfg.depth_grid = parse_list<int>(val, to_int);
        else if (key == "n_grid") cfg.n_grid = parse_list<int>(val, to_int);
        else if (key == "sigma_grid") cfg.sigma_grid = parse_list<double>(val, to_double);
        else if (key == "act_grid") cfg.act_grid = parse_list<std::string>(val, to_string_id);
        else if (key == "lr") cfg.lr = to_double(val);
        else if (key == "threshold") cfg.threshold = to_double(val);
        else if (key == "max_iters") cfg.max_iters = std::stol(val);
        else if (key == "basin_samples") cfg.basin_samples = to_int(val);
        else if (key == "idx_path") cfg.idx_path = val;
        else if (key == "image_count") cfg.image_count = to_int(val);
        else if (key == "image_offset") cfg.image_offset = to_int(val);
        else if (key == "threads") cfg.threads = to_int(val);
        else if (key == "quick") cfg.quick = (val == "true" || val == "1");
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

}  // namespace ntkae
