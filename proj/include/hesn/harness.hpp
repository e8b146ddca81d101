#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hesn/optimizer.hpp"
#include "hesn/reservoir.hpp"
#include "hesn/tasks.hpp"

namespace hesn {

inline constexpr const char* artifact_version = "1.0.0";
inline constexpr std::size_t desk_scale_generations = 300;

struct ExperimentConfig {
    TaskKind task = TaskKind::narma10;
    Architecture architecture = Architecture::shallow;
    std::size_t total_nodes = 300;
    std::size_t n_subs = 1;
    GaConfig ga = [] {
        GaConfig c;
        c.generations = desk_scale_generations;
        return c;
    }();
    std::size_t n_final_seeds = 10;
    double lambda = default_ridge_lambda;
    std::uint64_t root_seed = 0;
    std::string data_path;
    std::string out_dir;
    bool include_last_layer = true;
    std::optional<SplitLengths> lengths;  // task defaults when absent
    std::optional<Genome> genome;         // skips the GA when present

    void validate() const;
    Topology topology_template() const;
    SplitLengths effective_lengths() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Seeds derived from the root seed with derive_seed(root, tag).
struct SeedPlan {
    std::uint64_t task = 0;
    std::uint64_t ga = 0;
    std::uint64_t fitness = 0;
    std::uint64_t final_base = 0;  // final build seed i = derive_seed(final_base, i)
    std::uint64_t analysis = 0;

    std::uint64_t final_seed(std::size_t i) const;
};

SeedPlan derive_seed_plan(std::uint64_t root_seed);

/// Generates (or loads, for santa_fe) the task series and splits it.
DatasetSplit make_task_split(TaskKind task, const SplitLengths& lengths, std::uint64_t seed,
                             const std::string& data_path);

struct SummaryStats {
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

/// Percentiles by linear interpolation between order statistics.
SummaryStats summarize(const std::vector<double>& values);

struct ExperimentResult {
    ExperimentConfig config;
    Genome genome;
    double validation_nrmse = failed_fitness;
    GaResult ga;  // empty history when the genome was supplied
    std::vector<std::uint64_t> seeds;
    std::vector<double> test_nrmse;
    SummaryStats stats;
    double wall_clock_seconds = 0.0;
};

/// Result document; wall-clock time is kept out so replays are byte-identical.
nlohmann::json experiment_result_to_json(const ExperimentResult& result);

/// GA on validation NRMSE (unless a genome is given), then the winning genome
/// is rebuilt on n_final_seeds fresh build seeds and scored on the test
/// segment. Writes result.json, seeds.csv, ga_history.csv and timing.json
/// when out_dir is set. `threads` bounds the per-seed parallelism.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads = 0);

struct CellOutcome {
    ExperimentConfig config;
    std::optional<ExperimentResult> result;
    std::string error;
};

struct MatrixOptions {
    std::size_t threads = 0;      // 0 = thread_budget()
    bool reuse_genome = false;    // optimize the first cell of each (architecture, task) only
    std::string matrix_csv;       // combined CSV path; empty = none
};

/// Runs every cell; a failing cell is recorded and the rest proceed. Rows of
/// the combined CSV: architecture,total_nodes,n_subs,task,seed,nrmse.
std::vector<CellOutcome> run_matrix(const std::vector<ExperimentConfig>& configs,
                                    const MatrixOptions& options = {});

void write_matrix_csv(const std::filesystem::path& path, const std::vector<CellOutcome>& cells);

/// Cells varying the total size (wide/deep use 100-node sub-reservoirs).
std::vector<ExperimentConfig> size_sweep(const ExperimentConfig& base,
                                         const std::vector<std::size_t>& sizes,
                                         const std::vector<TaskKind>& tasks);

/// Wide and deep cells varying the number of sub-reservoirs at a fixed total,
/// plus one shallow baseline per task.
std::vector<ExperimentConfig> subs_sweep(const ExperimentConfig& base,
                                         const std::vector<std::size_t>& n_subs,
                                         const std::vector<TaskKind>& tasks);

/// Matrix file: a JSON array of configs, or {"preset": "size_sweep" |
/// "subs_sweep", "base": {...}, "tasks": [...], "sizes"/"n_subs": [...],
/// "reuse_genome": bool}.
std::vector<ExperimentConfig> matrix_from_json(const nlohmann::json& doc, MatrixOptions* options);

/// Genome resized to n_subs sub-reservoirs: extra triples repeat the last one.
Genome resize_genome(const Genome& genome, std::size_t n_subs);

} // namespace hesn
