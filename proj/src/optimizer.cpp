#include "hesn/optimizer.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <string>

#include <spdlog/spdlog.h>

#include "hesn/errors.hpp"

namespace hesn {

namespace {

constexpr const char* ga_result_format = "hier-esn/ga-result";
constexpr int ga_result_version = 1;

nlohmann::json fitness_to_json(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double fitness_from_json(const nlohmann::json& v) {
    return v.is_null() ? failed_fitness : v.get<double>();
}

using GenomeKey = std::vector<std::uint64_t>;

GenomeKey key_of(const Genome& g) {
    GenomeKey key(g.genes.size());
    for (std::size_t i = 0; i < g.genes.size(); ++i) key[i] = std::bit_cast<std::uint64_t>(g.genes[i]);
    return key;
}

} // namespace

std::vector<HyperParams> genome_to_hyperparams(const Genome& genome) {
    if (genome.genes.empty() || genome.genes.size() % 3 != 0)
        throw ArgumentError("genome length must be a positive multiple of 3, got " +
                            std::to_string(genome.genes.size()));
    std::vector<HyperParams> hyper;
    for (std::size_t i = 0; i < genome.genes.size(); i += 3)
        hyper.push_back({genome.genes[i], genome.genes[i + 1], genome.genes[i + 2]});
    return hyper;
}

Genome hyperparams_to_genome(const std::vector<HyperParams>& hyper) {
    Genome g;
    for (const auto& h : hyper) {
        g.genes.push_back(h.input_scaling);
        g.genes.push_back(h.spectral_radius);
        g.genes.push_back(h.leaky_rate);
    }
    return g;
}

void GaConfig::validate() const {
    if (generations < 1) throw ArgumentError("GA generations must be >= 1");
    if (population_size < 2) throw ArgumentError("GA population size must be >= 2");
    if (duels_per_generation < 1) throw ArgumentError("GA duels per generation must be >= 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw ArgumentError("GA crossover rate must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw ArgumentError("GA mutation rate must lie in [0, 1]");
}

std::vector<Genome> random_population(std::size_t n, std::size_t genome_len, SeededRng& rng) {
    if (n < 2) throw ArgumentError("random_population: need at least 2 genomes");
    std::vector<Genome> population(n);
    for (auto& g : population) {
        g.genes.resize(genome_len);
        for (auto& gene : g.genes) gene = rng.uniform_open_closed01();
    }
    return population;
}

Genome crossover_into_loser(const Genome& winner, Genome loser, double rate, SeededRng& rng) {
    if (winner.size() != loser.size())
        throw DimensionError("crossover_into_loser: genomes differ in length");
    for (std::size_t i = 0; i < loser.genes.size(); ++i)
        if (rng.bernoulli(rate)) loser.genes[i] = winner.genes[i];
    return loser;
}

Genome mutate(Genome genome, double rate, SeededRng& rng) {
    for (auto& gene : genome.genes)
        if (rng.bernoulli(rate)) gene = rng.uniform_open_closed01();
    return genome;
}

DuelOutcome duel(std::vector<Genome>& population, SeededRng& rng, const FitnessFn& evaluate,
                 double crossover_rate, double mutation_rate) {
    const std::size_t n = population.size();
    if (n < 2) throw ArgumentError("duel: population needs at least 2 members");
    const std::size_t first = rng.index(n);
    std::size_t second = rng.index(n - 1);
    if (second >= first) ++second;

    const double fit_first = evaluate(population[first]);
    const double fit_second = evaluate(population[second]);

    DuelOutcome out;
    if (fit_second < fit_first) {
        out = {second, first, fit_second, fit_first, {}};
    } else {
        out = {first, second, fit_first, fit_second, {}};
    }
    out.loser_before = population[out.loser];
    Genome child = crossover_into_loser(population[out.winner], population[out.loser],
                                        crossover_rate, rng);
    population[out.loser] = mutate(std::move(child), mutation_rate, rng);
    return out;
}

Topology apply_genome(const Topology& topology_template, const Genome& genome) {
    Topology t = topology_template;
    t.hyper = genome_to_hyperparams(genome);
    if (t.hyper.size() != t.n_subs())
        throw ArgumentError("genome has " + std::to_string(genome.size()) + " genes, topology needs " +
                            std::to_string(3 * t.n_subs()));
    t.validate();
    return t;
}

FitnessEvaluator::FitnessEvaluator(Topology topology_template,
                                   std::shared_ptr<const DatasetSplit> split,
                                   std::uint64_t fitness_seed, EvalSettings settings)
    : template_(std::move(topology_template)),
      split_(std::move(split)),
      fitness_seed_(fitness_seed),
      settings_(settings),
      cache_(std::make_shared<UnitWeightCache>()) {
    if (!split_) throw ArgumentError("FitnessEvaluator: missing dataset split");
}

double FitnessEvaluator::operator()(const Genome& genome) const {
    try {
        const Topology topo = apply_genome(template_, genome);
        const auto unit = cache_->get(topo, fitness_seed_);
        auto model = fit_model(build_network(topo, *unit, fitness_seed_), *split_, settings_);
        const double score = segment_nrmse(model, *split_, split_->validation());
        if (!std::isfinite(score)) {
            spdlog::warn("fitness evaluation produced a non-finite NRMSE; scoring as failed");
            return failed_fitness;
        }
        return score;
    } catch (const Error& e) {
        spdlog::warn("fitness evaluation failed: {}", e.what());
        return failed_fitness;
    }
}

double evaluate_fitness(const Genome& genome, const Topology& topology_template,
                        const DatasetSplit& split, std::uint64_t fitness_seed,
                        const EvalSettings& settings) {
    const FitnessEvaluator evaluator(topology_template, std::make_shared<const DatasetSplit>(split),
                                     fitness_seed, settings);
    return evaluator(genome);
}

GaResult optimize(const GaConfig& config, std::size_t genome_len, const FitnessFn& fitness,
                  const OptimizeHooks& hooks) {
    config.validate();
    if (genome_len == 0) throw ArgumentError("optimize: genome length must be >= 1");

    SeededRng rng(config.ga_seed);
    auto population = random_population(config.population_size, genome_len, rng);

    GaResult result;
    std::map<GenomeKey, double> cache;
    const FitnessFn cached = [&](const Genome& g) {
        auto key = key_of(g);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        const double value = fitness(g);
        ++result.evaluations;
        cache.emplace(std::move(key), value);
        if (result.best.genes.empty() || value < result.best_nrmse) {
            result.best = g;
            result.best_nrmse = value;
        }
        return value;
    };

    result.history.reserve(config.generations);
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        for (std::size_t d = 0; d < config.duels_per_generation; ++d)
            duel(population, rng, cached, config.crossover_rate, config.mutation_rate);
        result.history.push_back(result.best_nrmse);
        if (hooks.on_generation) hooks.on_generation(gen, population);
    }
    return result;
}

GaResult optimize(const GaConfig& config, const Topology& topology_template,
                  const DatasetSplit& split, const EvalSettings& settings,
                  const OptimizeHooks& hooks) {
    const FitnessEvaluator evaluator(topology_template, std::make_shared<const DatasetSplit>(split),
                                     config.fitness_seed, settings);
    return optimize(config, evaluator.genome_length(),
                    [&](const Genome& g) { return evaluator(g); }, hooks);
}

nlohmann::json ga_config_to_json(const GaConfig& config) {
    return {{"generations", config.generations},
            {"population_size", config.population_size},
            {"crossover_rate", config.crossover_rate},
            {"mutation_rate", config.mutation_rate},
            {"duels_per_generation", config.duels_per_generation},
            {"fitness_seed", config.fitness_seed},
            {"ga_seed", config.ga_seed}};
}

GaConfig ga_config_from_json(const nlohmann::json& doc, GaConfig c) {
    try {
        c.generations = doc.value("generations", c.generations);
        c.population_size = doc.value("population_size", c.population_size);
        c.crossover_rate = doc.value("crossover_rate", c.crossover_rate);
        c.mutation_rate = doc.value("mutation_rate", c.mutation_rate);
        c.duels_per_generation = doc.value("duels_per_generation", c.duels_per_generation);
        c.fitness_seed = doc.value("fitness_seed", c.fitness_seed);
        c.ga_seed = doc.value("ga_seed", c.ga_seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid GA config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json ga_result_to_json(const GaResult& result) {
    nlohmann::json history = nlohmann::json::array();
    for (double v : result.history) history.push_back(fitness_to_json(v));
    return {{"format", ga_result_format},
            {"version", ga_result_version},
            {"best_genome", result.best.genes},
            {"best_nrmse", fitness_to_json(result.best_nrmse)},
            {"evaluations", result.evaluations},
            {"history", history}};
}

GaResult ga_result_from_json(const nlohmann::json& doc) {
    try {
        if (doc.value("format", std::string{}) != ga_result_format)
            throw ParseError("not a GA result document (format field missing or wrong)");
        GaResult r;
        r.best.genes = doc.at("best_genome").get<std::vector<double>>();
        r.best_nrmse = fitness_from_json(doc.at("best_nrmse"));
        r.evaluations = doc.at("evaluations").get<std::size_t>();
        for (const auto& v : doc.at("history")) r.history.push_back(fitness_from_json(v));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid GA result document: ") + e.what());
    }
}

void write_ga_history_csv(const std::filesystem::path& path, const GaResult& result) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "generation,best_nrmse\n" << std::setprecision(17);
    for (std::size_t g = 0; g < result.history.size(); ++g)
        out << g << ',' << result.history[g] << '\n';
}

} // namespace hesn
