#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "hesn/evaluation.hpp"
#include "hesn/reservoir.hpp"
#include "hesn/rng.hpp"
#include "hesn/tasks.hpp"

namespace hesn {

/// Hyperparameter genome: (IS, SR, alpha) per sub-reservoir, genes in (0, 1].
struct Genome {
    std::vector<double> genes;

    std::size_t size() const noexcept { return genes.size(); }
    bool operator==(const Genome&) const = default;
};

std::vector<HyperParams> genome_to_hyperparams(const Genome& genome);
Genome hyperparams_to_genome(const std::vector<HyperParams>& hyper);

/// Fitness returned for genomes whose evaluation failed; always loses a duel.
inline constexpr double failed_fitness = std::numeric_limits<double>::infinity();

struct GaConfig {
    std::size_t generations = 1000;
    std::size_t population_size = 15;
    double crossover_rate = 0.33;
    double mutation_rate = 0.33;
    std::size_t duels_per_generation = 1;
    std::uint64_t fitness_seed = 0;
    std::uint64_t ga_seed = 0;

    void validate() const;
};

struct GaResult {
    Genome best;
    double best_nrmse = failed_fitness;
    std::vector<double> history;  // best-ever NRMSE after each generation
    std::size_t evaluations = 0;  // fitness evaluations actually run (cache misses)
};

using FitnessFn = std::function<double(const Genome&)>;

std::vector<Genome> random_population(std::size_t n, std::size_t genome_len, SeededRng& rng);

/// Each loser gene is replaced by the winner's with probability `rate`.
Genome crossover_into_loser(const Genome& winner, Genome loser, double rate, SeededRng& rng);

/// Each gene is redrawn uniformly from (0, 1] with probability `rate`.
Genome mutate(Genome genome, double rate, SeededRng& rng);

struct DuelOutcome {
    std::size_t winner = 0;
    std::size_t loser = 0;
    double winner_fitness = 0.0;
    double loser_fitness = 0.0;
    Genome loser_before;  // loser genome as evaluated, before it was overwritten
};

/// Samples two distinct members, evaluates both, and overwrites the one with
/// the higher NRMSE by crossover with the winner followed by mutation. Ties
/// keep the first-sampled member as the winner.
DuelOutcome duel(std::vector<Genome>& population, SeededRng& rng, const FitnessFn& evaluate,
                 double crossover_rate, double mutation_rate);

/// Validation-NRMSE fitness of genomes for one (topology, split, build seed).
/// Raw weight draws are shared between genomes since only the scaling
/// changes. Failures map to failed_fitness and are logged.
class FitnessEvaluator {
public:
    FitnessEvaluator(Topology topology_template, std::shared_ptr<const DatasetSplit> split,
                     std::uint64_t fitness_seed, EvalSettings settings);

    double operator()(const Genome& genome) const;

    std::size_t genome_length() const noexcept { return 3 * template_.n_subs(); }
    const Topology& topology_template() const noexcept { return template_; }

private:
    Topology template_;
    std::shared_ptr<const DatasetSplit> split_;
    std::uint64_t fitness_seed_;
    EvalSettings settings_;
    std::shared_ptr<UnitWeightCache> cache_;
};

/// Builds with build seed `fitness_seed`, trains on the train segment and
/// returns the validation NRMSE (failed_fitness on any error).
double evaluate_fitness(const Genome& genome, const Topology& topology_template,
                        const DatasetSplit& split, std::uint64_t fitness_seed,
                        const EvalSettings& settings);

/// Topology template with the genome's hyperparameters substituted.
Topology apply_genome(const Topology& topology_template, const Genome& genome);

struct OptimizeHooks {
    // Called after every generation with the current population.
    std::function<void(std::size_t generation, const std::vector<Genome>& population)>
        on_generation;
};

/// Steady-state microbial GA: `generations` x `duels_per_generation` duels on
/// a population drawn from config.ga_seed. Fitness values are cached by exact
/// genome content.
GaResult optimize(const GaConfig& config, std::size_t genome_len, const FitnessFn& fitness,
                  const OptimizeHooks& hooks = {});
GaResult optimize(const GaConfig& config, const Topology& topology_template,
                  const DatasetSplit& split, const EvalSettings& settings,
                  const OptimizeHooks& hooks = {});

nlohmann::json ga_config_to_json(const GaConfig& config);
GaConfig ga_config_from_json(const nlohmann::json& doc, GaConfig defaults = {});
nlohmann::json ga_result_to_json(const GaResult& result);
GaResult ga_result_from_json(const nlohmann::json& doc);
void write_ga_history_csv(const std::filesystem::path& path, const GaResult& result);

} // namespace hesn
