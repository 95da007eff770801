#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace ntkae {

enum class ExperimentId {
    depth_single,
    linear_hist,
    radius_curve,
    basin_curve,
    mnist_basin,
    activation_compare,
    verify_all,
};

ExperimentId experiment_from_name(const std::string& name);
const char* experiment_name(ExperimentId id);

struct ExperimentConfig {
    ExperimentId id = ExperimentId::radius_curve;
    int n0 = 32;
    int n = 5;
    int depth = 2;
    std::string act = "sigmoid";
    std::uint64_t seed = 1;
    int repetitions = 100;
    double r = 0.0;  // 0 -> sqrt(n0)

    std::vector<double> r_grid;
    std::vector<int> width_grid;
    std::vector<int> depth_grid;
    std::vector<int> n_grid;
    std::vector<double> sigma_grid;
    std::vector<std::string> act_grid;

    double lr = 1.0;
    double threshold = 1e-7;
    long max_iters = 500000;
    int basin_samples = 100;

    std::string idx_path;
    int image_count = 10;
    int image_offset = 0;

    int threads = 0;  // 0 = hardware concurrency
    bool quick = false;  // verify_all only: reduced battery sizes

    // Fills empty grids with the per-experiment defaults and validates;
    // throws std::invalid_argument naming the offending field.
    void finalize();
};

using Value = std::variant<long long, double, bool, std::string>;

struct ResultTable {
    std::string schema;  // versioned schema tag, written as a header comment
    std::uint64_t seed = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
};

ResultTable run_experiment(const ExperimentConfig& cfg);

void write_csv(const ResultTable& table, std::ostream& out);
void write_json(const ResultTable& table, std::ostream& out);

// Flat key=value configuration files ('#' starts a comment). Unknown keys
// are rejected. Grid values are comma-separated.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv);

}  // namespace ntkae
