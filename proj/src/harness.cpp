#include "hesn/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hesn/errors.hpp"
#include "hesn/parallel.hpp"
#include "hesn/stats.hpp"

namespace hesn {

namespace {

constexpr const char* result_format = "hier-esn/experiment-result";
constexpr int result_version = 1;

enum SeedTag : std::uint64_t { tag_task = 1, tag_ga = 2, tag_fitness = 3, tag_final = 4, tag_analysis = 5 };

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

} // namespace

void ExperimentConfig::validate() const {
    if (architecture == Architecture::shallow && n_subs != 1)
        throw ArgumentError("shallow architecture requires n_subs = 1");
    if (n_subs < 1) throw ArgumentError("n_subs must be >= 1");
    if (total_nodes < n_subs) throw ArgumentError("total_nodes must be >= n_subs");
    if (n_final_seeds < 1) throw ArgumentError("n_final_seeds must be >= 1");
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
    if (task == TaskKind::santa_fe && data_path.empty())
        throw ArgumentError("santa_fe task requires data_path");
    ga.validate();
    if (genome && genome->size() != 3 * n_subs)
        throw ArgumentError("genome has " + std::to_string(genome->size()) + " genes, expected " +
                            std::to_string(3 * n_subs));
}

Topology ExperimentConfig::topology_template() const {
    Topology t;
    t.kind = architecture;
    t.sub_sizes = split_nodes(total_nodes, n_subs);
    t.input_dim = 1;
    t.hyper.assign(n_subs, HyperParams{});
    t.include_last_layer = include_last_layer;
    t.validate();
    return t;
}

SplitLengths ExperimentConfig::effective_lengths() const {
    return lengths ? *lengths : task_defaults(task).lengths;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
    try {
        ExperimentConfig c;
        c.task = parse_task(doc.at("task").get<std::string>());
        c.architecture = parse_architecture(doc.at("architecture").get<std::string>());
        c.total_nodes = doc.value("total_nodes", c.total_nodes);
        c.n_subs = doc.value("n_subs", c.architecture == Architecture::shallow ? std::size_t{1}
                                                                                : std::size_t{3});
        if (doc.contains("ga")) c.ga = ga_config_from_json(doc.at("ga"), c.ga);
        c.n_final_seeds = doc.value("n_final_seeds", c.n_final_seeds);
        c.lambda = doc.value("lambda", c.lambda);
        c.root_seed = doc.value("root_seed", c.root_seed);
        c.data_path = doc.value("data_path", std::string{});
        c.out_dir = doc.value("out_dir", std::string{});
        c.include_last_layer = doc.value("include_last_layer", true);
        if (doc.contains("lengths")) {
            const auto& l = doc.at("lengths");
            SplitLengths defaults = task_defaults(c.task).lengths;
            c.lengths = SplitLengths{l.value("washout", defaults.washout),
                                     l.value("train", defaults.train),
                                     l.value("validation", defaults.validation),
                                     l.value("test", defaults.test)};
        }
        if (doc.contains("genome") && !doc.at("genome").is_null())
            c.genome = Genome{doc.at("genome").get<std::vector<double>>()};
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid experiment config: ") + e.what());
    }
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
    nlohmann::json ga = ga_config_to_json(c.ga);
    ga.erase("fitness_seed");
    ga.erase("ga_seed");
    nlohmann::json doc = {{"task", to_string(c.task)},
                          {"architecture", to_string(c.architecture)},
                          {"total_nodes", c.total_nodes},
                          {"n_subs", c.n_subs},
                          {"ga", ga},
                          {"n_final_seeds", c.n_final_seeds},
                          {"lambda", c.lambda},
                          {"root_seed", c.root_seed},
                          {"data_path", c.data_path},
                          {"out_dir", c.out_dir},
                          {"include_last_layer", c.include_last_layer}};
    if (c.lengths) {
        doc["lengths"] = {{"washout", c.lengths->washout},
                          {"train", c.lengths->train},
                          {"validation", c.lengths->validation},
                          {"test", c.lengths->test}};
    }
    if (c.genome) doc["genome"] = c.genome->genes;
    return doc;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("config file not found: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return experiment_config_from_json(doc);
}

std::uint64_t SeedPlan::final_seed(std::size_t i) const { return derive_seed(final_base, i); }

SeedPlan derive_seed_plan(std::uint64_t root) {
    return {derive_seed(root, tag_task), derive_seed(root, tag_ga), derive_seed(root, tag_fitness),
            derive_seed(root, tag_final), derive_seed(root, tag_analysis)};
}

DatasetSplit make_task_split(TaskKind task, const SplitLengths& lengths, std::uint64_t seed,
                             const std::string& data_path) {
    const auto defaults = task_defaults(task);
    const std::size_t length = lengths.total() + defaults.horizon;
    switch (task) {
    case TaskKind::narma10: {
        const auto series = gen_narma10(length, seed);
        return split_dataset(series.input, series.output, lengths, defaults.horizon);
    }
    case TaskKind::mackey_glass: {
        const auto series = gen_mackey_glass(length, MackeyGlassParams{}, seed);
        return split_dataset(series, series, lengths, defaults.horizon);
    }
    case TaskKind::mso12: {
        const auto series = gen_mso12(length);
        return split_dataset(series, series, lengths, defaults.horizon);
    }
    case TaskKind::santa_fe: {
        if (data_path.empty()) throw ArgumentError("santa_fe task requires a data file path");
        const auto series = load_santa_fe(data_path, length);
        return split_dataset(series, series, lengths, defaults.horizon);
    }
    }
    throw ArgumentError("unknown task");
}

SummaryStats summarize(const std::vector<double>& values) {
    if (values.empty()) throw ArgumentError("summarize: no values");
    SummaryStats s;
    s.min = percentile(values, 0.0);
    s.p25 = percentile(values, 0.25);
    s.median = percentile(values, 0.5);
    s.p75 = percentile(values, 0.75);
    s.max = percentile(values, 1.0);
    s.mean = mean(values);
    return s;
}

nlohmann::json experiment_result_to_json(const ExperimentResult& r) {
    nlohmann::json seeds = nlohmann::json::array();
    for (std::size_t i = 0; i < r.seeds.size(); ++i)
        seeds.push_back({{"seed", r.seeds[i]}, {"nrmse", number_or_null(r.test_nrmse[i])}});
    nlohmann::json history = nlohmann::json::array();
    for (double v : r.ga.history) history.push_back(number_or_null(v));
    nlohmann::json hyper = nlohmann::json::array();
    for (const auto& h : genome_to_hyperparams(r.genome))
        hyper.push_back({{"input_scaling", h.input_scaling},
                         {"spectral_radius", h.spectral_radius},
                         {"leaky_rate", h.leaky_rate}});
    return {{"format", result_format},
            {"version", result_version},
            {"artifact_version", artifact_version},
            {"config", experiment_config_to_json(r.config)},
            {"genome", r.genome.genes},
            {"hyperparams", hyper},
            {"validation_nrmse", number_or_null(r.validation_nrmse)},
            {"ga", {{"evaluations", r.ga.evaluations}, {"history", history}}},
            {"seeds", seeds},
            {"summary",
             {{"min", number_or_null(r.stats.min)},
              {"p25", number_or_null(r.stats.p25)},
              {"median", number_or_null(r.stats.median)},
              {"p75", number_or_null(r.stats.p75)},
              {"max", number_or_null(r.stats.max)},
              {"mean", number_or_null(r.stats.mean)},
              {"percentile_method", "linear"}}}};
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
    config.validate();
    if (threads == 0) threads = thread_budget();
    const auto started = std::chrono::steady_clock::now();
    const SeedPlan seeds = derive_seed_plan(config.root_seed);

    const auto split = std::make_shared<const DatasetSplit>(
        make_task_split(config.task, config.effective_lengths(), seeds.task, config.data_path));
    const Topology templ = config.topology_template();
    const EvalSettings settings = eval_settings_for(config.task, config.lambda);

    ExperimentResult result;
    result.config = config;
    if (config.genome) {
        result.genome = *config.genome;
        result.validation_nrmse = evaluate_fitness(result.genome, templ, *split, seeds.fitness, settings);
    } else {
        GaConfig ga = config.ga;
        ga.ga_seed = seeds.ga;
        ga.fitness_seed = seeds.fitness;
        spdlog::info("{} / {} / {} nodes / {} subs: GA for {} generations",
                     to_string(config.task), to_string(config.architecture), config.total_nodes,
                     config.n_subs, ga.generations);
        result.ga = optimize(ga, templ, *split, settings);
        result.genome = result.ga.best;
        result.validation_nrmse = result.ga.best_nrmse;
    }

    const Topology topo = apply_genome(templ, result.genome);
    result.seeds.resize(config.n_final_seeds);
    result.test_nrmse.assign(config.n_final_seeds, failed_fitness);
    parallel_for(config.n_final_seeds, threads, [&](std::size_t i) {
        result.seeds[i] = seeds.final_seed(i);
        try {
            auto model = fit_model(build_network(topo, result.seeds[i]), *split, settings);
            result.test_nrmse[i] = segment_nrmse(model, *split, split->test());
        } catch (const Error& e) {
            spdlog::warn("final evaluation with seed {} failed: {}", result.seeds[i], e.what());
        }
    });
    result.stats = summarize(result.test_nrmse);
    result.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "result.json", experiment_result_to_json(result).dump(2) + "\n");
        std::ostringstream csv;
        csv << "seed,nrmse\n" << std::setprecision(17);
        for (std::size_t i = 0; i < result.seeds.size(); ++i)
            csv << result.seeds[i] << ',' << result.test_nrmse[i] << '\n';
        write_text(dir / "seeds.csv", csv.str());
        if (!result.ga.history.empty()) write_ga_history_csv(dir / "ga_history.csv", result.ga);
        write_text(dir / "timing.json",
                   nlohmann::json{{"wall_clock_seconds", result.wall_clock_seconds}}.dump(2) + "\n");
    }
    return result;
}

Genome resize_genome(const Genome& genome, std::size_t n_subs) {
    auto hyper = genome_to_hyperparams(genome);
    if (n_subs == 0) throw ArgumentError("resize_genome: n_subs must be >= 1");
    hyper.resize(n_subs, hyper.back());
    return hyperparams_to_genome(hyper);
}

std::vector<CellOutcome> run_matrix(const std::vector<ExperimentConfig>& configs,
                                    const MatrixOptions& options) {
    if (configs.empty()) throw ArgumentError("run_matrix: no experiment cells");
    const std::size_t threads = options.threads == 0 ? thread_budget() : options.threads;
    std::vector<CellOutcome> cells(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) cells[i].config = configs[i];

    auto run_cell = [&](std::size_t i) {
        try {
            cells[i].result = run_experiment(cells[i].config, 1);
        } catch (const std::exception& e) {
            cells[i].error = e.what();
            spdlog::error("cell {} failed: {}", i, e.what());
        }
    };

    if (options.reuse_genome) {
        // Leaders are the first cell of each (architecture, task) group.
        std::map<std::pair<int, int>, std::size_t> leader;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::pair key{static_cast<int>(cells[i].config.architecture),
                                static_cast<int>(cells[i].config.task)};
            leader.try_emplace(key, i);
        }
        std::vector<std::size_t> leaders;
        for (const auto& [key, idx] : leader) leaders.push_back(idx);
        parallel_for(leaders.size(), threads, [&](std::size_t j) { run_cell(leaders[j]); });
        std::vector<std::size_t> followers;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::pair key{static_cast<int>(cells[i].config.architecture),
                                static_cast<int>(cells[i].config.task)};
            const std::size_t lead = leader.at(key);
            if (lead == i) continue;
            if (cells[lead].result && !cells[i].config.genome)
                cells[i].config.genome = resize_genome(cells[lead].result->genome,
                                                       cells[i].config.n_subs);
            followers.push_back(i);
        }
        parallel_for(followers.size(), threads, [&](std::size_t j) { run_cell(followers[j]); });
    } else {
        parallel_for(cells.size(), threads, run_cell);
    }

    if (!options.matrix_csv.empty()) write_matrix_csv(options.matrix_csv, cells);
    return cells;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<CellOutcome>& cells) {
    std::ostringstream csv;
    csv << "architecture,total_nodes,n_subs,task,seed,nrmse\n" << std::setprecision(17);
    for (const auto& cell : cells) {
        if (!cell.result) continue;
        const auto& c = cell.config;
        for (std::size_t i = 0; i < cell.result->seeds.size(); ++i)
            csv << to_string(c.architecture) << ',' << c.total_nodes << ',' << c.n_subs << ','
                << to_string(c.task) << ',' << cell.result->seeds[i] << ','
                << cell.result->test_nrmse[i] << '\n';
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_text(path, csv.str());
}

namespace {

std::string cell_dir(const ExperimentConfig& base, const ExperimentConfig& c) {
    if (base.out_dir.empty()) return {};
    return (std::filesystem::path(base.out_dir) /
            (to_string(c.task) + "_" + to_string(c.architecture) + "_" +
             std::to_string(c.total_nodes) + "_" + std::to_string(c.n_subs)))
        .string();
}

} // namespace

std::vector<ExperimentConfig> size_sweep(const ExperimentConfig& base,
                                         const std::vector<std::size_t>& sizes,
                                         const std::vector<TaskKind>& tasks) {
    std::vector<ExperimentConfig> out;
    for (TaskKind task : tasks) {
        for (Architecture arch : {Architecture::shallow, Architecture::wide, Architecture::deep}) {
            for (std::size_t size : sizes) {
                ExperimentConfig c = base;
                c.task = task;
                c.architecture = arch;
                c.total_nodes = size;
                c.n_subs = arch == Architecture::shallow ? 1 : std::max<std::size_t>(1, size / 100);
                c.genome.reset();
                c.lengths.reset();
                c.out_dir = cell_dir(base, c);
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> subs_sweep(const ExperimentConfig& base,
                                         const std::vector<std::size_t>& n_subs,
                                         const std::vector<TaskKind>& tasks) {
    std::vector<ExperimentConfig> out;
    for (TaskKind task : tasks) {
        ExperimentConfig shallow = base;
        shallow.task = task;
        shallow.architecture = Architecture::shallow;
        shallow.n_subs = 1;
        shallow.genome.reset();
        shallow.lengths.reset();
        shallow.out_dir = cell_dir(base, shallow);
        out.push_back(shallow);
        for (Architecture arch : {Architecture::wide, Architecture::deep}) {
            for (std::size_t subs : n_subs) {
                ExperimentConfig c = base;
                c.task = task;
                c.architecture = arch;
                c.n_subs = subs;
                c.genome.reset();
                c.lengths.reset();
                c.out_dir = cell_dir(base, c);
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> matrix_from_json(const nlohmann::json& doc, MatrixOptions* options) {
    try {
        if (doc.is_array()) {
            std::vector<ExperimentConfig> configs;
            for (const auto& cell : doc) configs.push_back(experiment_config_from_json(cell));
            return configs;
        }
        const std::string preset = doc.at("preset").get<std::string>();
        nlohmann::json base_doc = doc.value("base", nlohmann::json::object());
        if (!base_doc.contains("task")) base_doc["task"] = "narma10";
        if (!base_doc.contains("architecture")) base_doc["architecture"] = "shallow";
        const ExperimentConfig base = experiment_config_from_json(base_doc);
        std::vector<TaskKind> tasks;
        for (const auto& t : doc.value("tasks", std::vector<std::string>{"narma10", "santa_fe",
                                                                         "mackey_glass"}))
            tasks.push_back(parse_task(t));
        if (options) options->reuse_genome = doc.value("reuse_genome", options->reuse_genome);
        if (preset == "size_sweep")
            return size_sweep(base, doc.value("sizes", std::vector<std::size_t>{200, 300, 400, 500}),
                              tasks);
        if (preset == "subs_sweep")
            return subs_sweep(base, doc.value("n_subs", std::vector<std::size_t>{2, 3, 4, 5}), tasks);
        throw ParseError("unknown matrix preset '" + preset + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid matrix document: ") + e.what());
    }
}

} // namespace hesn
