#include "hesn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "hesn/analysis.hpp"
#include "hesn/errors.hpp"
#include "hesn/harness.hpp"

namespace hesn {

namespace {

namespace fs = std::filesystem;

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("file not found: " + path.string());
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

struct Options {
    // generate
    std::string task;
    std::size_t length = 0;
    std::string out;
    std::string data_path;
    // shared
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string genome_path;
    std::string network_path;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> n_seeds;
    std::optional<double> lambda;
    // analyze
    std::size_t mso_length = 4196;
    std::size_t fft_len = 4096;
    std::size_t max_delay = 100;
    bool reuse_genome = false;
};

ExperimentConfig config_with_overrides(const Options& o) {
    ExperimentConfig c = load_experiment_config(o.config_path);
    if (o.seed) c.root_seed = *o.seed;
    if (o.generations) c.ga.generations = *o.generations;
    if (o.n_seeds) c.n_final_seeds = *o.n_seeds;
    if (o.lambda) c.lambda = *o.lambda;
    if (!o.data_path.empty()) c.data_path = o.data_path;
    if (!o.out.empty()) c.out_dir = o.out;
    c.validate();
    return c;
}

int cmd_generate(const Options& o) {
    const TaskKind task = parse_task(o.task);
    const auto defaults = task_defaults(task);
    const std::size_t length = o.length ? o.length : defaults.lengths.total() + defaults.horizon;
    const std::uint64_t seed = o.seed.value_or(0);
    const fs::path out(o.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    switch (task) {
    case TaskKind::narma10: write_narma10_csv(out, gen_narma10(length, seed)); break;
    case TaskKind::mackey_glass:
        write_series_csv(out, gen_mackey_glass(length, MackeyGlassParams{}, seed));
        break;
    case TaskKind::mso12: write_series_csv(out, gen_mso12(length)); break;
    case TaskKind::santa_fe:
        if (o.data_path.empty()) throw ArgumentError("generate santa_fe needs --data");
        write_series_csv(out, load_santa_fe(o.data_path));
        break;
    }
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

int cmd_optimize(const Options& o) {
    ExperimentConfig c = config_with_overrides(o);
    const SeedPlan seeds = derive_seed_plan(c.root_seed);
    const auto split = make_task_split(c.task, c.effective_lengths(), seeds.task, c.data_path);
    GaConfig ga = c.ga;
    ga.ga_seed = seeds.ga;
    ga.fitness_seed = seeds.fitness;
    const Topology templ = c.topology_template();
    const GaResult result = optimize(ga, templ, split, eval_settings_for(c.task, c.lambda));

    const fs::path dir = prepare_dir(c.out_dir.empty() ? "." : c.out_dir);
    write_json(dir / "ga_result.json", ga_result_to_json(result));
    write_ga_history_csv(dir / "ga_history.csv", result);
    write_json(dir / "network.json",
               network_to_json(build_network(apply_genome(templ, result.best), seeds.fitness)));
    std::cout << "best validation NRMSE " << result.best_nrmse << " after " << result.evaluations
              << " evaluations\n";
    return 0;
}

int cmd_evaluate(const Options& o) {
    ExperimentConfig c = config_with_overrides(o);
    c.genome = ga_result_from_json(read_json(o.genome_path)).best;
    c.validate();
    const auto result = run_experiment(c);
    std::cout << "test NRMSE median " << result.stats.median << " mean " << result.stats.mean
              << " over " << result.seeds.size() << " seeds\n";
    return 0;
}

ReservoirNetwork load_network(const std::string& path) { return network_from_json(read_json(path)); }

int cmd_analyze_states(const Options& o) {
    auto net = load_network(o.network_path);
    const TaskKind task = parse_task(o.task);
    const auto lengths = task_defaults(task).lengths;
    const SeedPlan seeds = derive_seed_plan(o.seed.value_or(0));
    const auto split = make_task_split(task, lengths, seeds.task, o.data_path);
    const auto test = split.test();
    const std::size_t begin = test.begin - lengths.washout;
    const Matrix inputs = split.input.middleRows(static_cast<Eigen::Index>(begin),
                                                 static_cast<Eigen::Index>(test.end - begin));
    const auto dist = node_state_distribution(net, inputs, lengths.washout);
    const fs::path dir = prepare_dir(o.out);
    write_state_distribution_csv(dir / "states.csv", dist);
    std::cout << "wrote " << (dir / "states.csv").string() << '\n';
    return 0;
}

int cmd_analyze_spectrum(const Options& o) {
    auto net = load_network(o.network_path);
    SpectrumOptions options;
    options.mso_length = o.mso_length;
    options.fft_len = o.fft_len;
    const auto profile = sub_reservoir_spectrum(net, options);
    const fs::path dir = prepare_dir(o.out);
    write_spectrum_csv(dir / "spectrum.csv", profile);
    write_spectrum_peaks_csv(dir / "spectrum_peaks.csv", profile, mso12_frequencies());
    std::cout << "wrote " << (dir / "spectrum.csv").string() << " and "
              << (dir / "spectrum_peaks.csv").string() << '\n';
    return 0;
}

int cmd_analyze_mc(const Options& o) {
    auto net = load_network(o.network_path);
    const auto result = memory_capacity(net, o.lambda.value_or(default_ridge_lambda), o.max_delay,
                                        derive_seed_plan(o.seed.value_or(0)).analysis);
    const fs::path dir = prepare_dir(o.out);
    write_memory_capacity_csv(dir / "mc.csv", result);
    write_json(dir / "mc.json", memory_capacity_to_json(result));
    std::cout << "memory capacity " << result.total << '\n';
    return 0;
}

int cmd_experiment(const Options& o) {
    const auto result = run_experiment(config_with_overrides(o));
    std::cout << "test NRMSE median " << result.stats.median << " mean " << result.stats.mean
              << " (validation " << result.validation_nrmse << ")\n";
    return 0;
}

int cmd_matrix(const Options& o) {
    MatrixOptions options;
    options.reuse_genome = o.reuse_genome;
    auto configs = matrix_from_json(read_json(o.config_path), &options);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto& c = configs[i];
        if (o.seed) c.root_seed = *o.seed;
        if (o.generations) c.ga.generations = *o.generations;
        if (o.n_seeds) c.n_final_seeds = *o.n_seeds;
        if (!o.data_path.empty()) c.data_path = o.data_path;
        if (!o.out.empty()) {
            const std::string leaf = fs::path(c.out_dir).filename().string();
            c.out_dir = (fs::path(o.out) / (leaf.empty() ? "cell_" + std::to_string(i) : leaf)).string();
        }
    }
    const fs::path dir = prepare_dir(o.out.empty() ? "." : o.out);
    options.matrix_csv = (dir / "matrix.csv").string();
    const auto cells = run_matrix(configs, options);
    std::size_t failed = 0;
    for (const auto& cell : cells) failed += cell.result ? 0 : 1;
    std::cout << cells.size() - failed << " of " << cells.size() << " cells completed; wrote "
              << options.matrix_csv << '\n';
    return failed == 0 ? 0 : 1;
}

} // namespace

int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{"Hierarchical echo state network experiments"};
    app.name("hier-esn");
    app.require_subcommand(1);
    Options o;
    int (*action)(const Options&) = nullptr;

    auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", o.seed, "Root seed override"); };

    auto* gen = app.add_subcommand("generate", "Write a task series as CSV");
    gen->add_option("task", o.task, "narma10 | mackey_glass | mso12 | santa_fe")->required();
    gen->add_option("--length", o.length, "Number of samples");
    gen->add_option("--out", o.out, "Output CSV path")->required();
    gen->add_option("--data", o.data_path, "Santa Fe data file");
    add_seed(gen);
    gen->callback([&] { action = cmd_generate; });

    auto add_config_cmd = [&](const std::string& name, const std::string& help, bool positional) {
        auto* cmd = app.add_subcommand(name, help);
        if (positional)
            cmd->add_option("config", o.config_path, "Config JSON")->required();
        else
            cmd->add_option("--config", o.config_path, "Config JSON")->required();
        cmd->add_option("--out", o.out, "Output directory (overrides out_dir)");
        cmd->add_option("--generations", o.generations, "GA generations override");
        cmd->add_option("--seeds", o.n_seeds, "Number of final build seeds");
        cmd->add_option("--lambda", o.lambda, "Ridge coefficient override");
        cmd->add_option("--data", o.data_path, "Santa Fe data file override");
        add_seed(cmd);
        return cmd;
    };

    add_config_cmd("optimize", "Run the GA and write ga_result.json", false)
        ->callback([&] { action = cmd_optimize; });
    auto* eval = add_config_cmd("evaluate", "Score a GA result on fresh build seeds", false);
    eval->add_option("--genome", o.genome_path, "ga_result.json from optimize")->required();
    eval->callback([&] { action = cmd_evaluate; });
    add_config_cmd("experiment", "Run one experiment cell", true)
        ->callback([&] { action = cmd_experiment; });
    auto* matrix = add_config_cmd("matrix", "Run a list or preset of experiment cells", true);
    matrix->add_flag("--reuse-genome", o.reuse_genome,
                     "Optimize once per (architecture, task) and reuse the genome");
    matrix->callback([&] { action = cmd_matrix; });

    auto* analyze = app.add_subcommand("analyze", "Reservoir quality probes");
    analyze->require_subcommand(1);
    auto add_network = [&](CLI::App* cmd) {
        cmd->add_option("--network", o.network_path, "Network JSON")->required();
        cmd->add_option("--out", o.out, "Output directory")->required();
        add_seed(cmd);
    };
    auto* states = analyze->add_subcommand("states", "Node-state distribution on a task's test segment");
    add_network(states);
    states->add_option("--task", o.task, "Task driving the network")->required();
    states->add_option("--data", o.data_path, "Santa Fe data file");
    states->callback([&] { action = cmd_analyze_states; });
    auto* spectrum = analyze->add_subcommand("spectrum", "Per-sub-reservoir spectra under MSO12 drive");
    add_network(spectrum);
    spectrum->add_option("--mso-length", o.mso_length, "Drive length");
    spectrum->add_option("--fft-len", o.fft_len, "FFT length (power of two)");
    spectrum->callback([&] { action = cmd_analyze_spectrum; });
    auto* mc = analyze->add_subcommand("mc", "Memory capacity");
    add_network(mc);
    mc->add_option("--k", o.max_delay, "Largest delay");
    mc->add_option("--lambda", o.lambda, "Ridge coefficient");
    mc->callback([&] { action = cmd_analyze_mc; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!action) return 2;
    try {
        return action(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace hesn
