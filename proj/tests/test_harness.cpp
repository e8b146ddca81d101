#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "hesn/cli.hpp"
#include "hesn/errors.hpp"
#include "hesn/harness.hpp"
#include "hesn/rng.hpp"

using namespace hesn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hesn_harness_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hier-esn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

// Small NARMA10 cell that runs in well under a second.
nlohmann::json tiny_config(const fs::path& out) {
    return {{"task", "narma10"},
            {"architecture", "deep"},
            {"total_nodes", 30},
            {"n_subs", 2},
            {"ga", {{"generations", 5}}},
            {"n_final_seeds", 3},
            {"root_seed", 11},
            {"out_dir", out.string()},
            {"lengths", {{"washout", 50}, {"train", 300}, {"validation", 50}, {"test", 50}}}};
}

} // namespace

TEST_SUITE("config") {
    TEST_CASE("defaults from a minimal document") {
        const auto c = experiment_config_from_json({{"task", "mackey_glass"}, {"architecture", "wide"}});
        CHECK(c.task == TaskKind::mackey_glass);
        CHECK(c.architecture == Architecture::wide);
        CHECK(c.total_nodes == 300);
        CHECK(c.n_subs == 3);
        CHECK(c.ga.generations == desk_scale_generations);
        CHECK(c.ga.population_size == 15);
        CHECK(c.n_final_seeds == 10);
        CHECK(c.lambda == default_ridge_lambda);
        CHECK(!c.lengths);
        CHECK(c.effective_lengths() == task_defaults(TaskKind::mackey_glass).lengths);
        const auto shallow = experiment_config_from_json({{"task", "narma10"}, {"architecture", "shallow"}});
        CHECK(shallow.n_subs == 1);
    }

    TEST_CASE("round trip") {
        auto c = experiment_config_from_json(tiny_config("/tmp/x"));
        c.genome = Genome{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
        const auto back = experiment_config_from_json(experiment_config_to_json(c));
        CHECK(back.total_nodes == 30);
        CHECK(back.n_subs == 2);
        CHECK(back.ga.generations == 5);
        CHECK(back.root_seed == 11);
        REQUIRE(back.lengths);
        CHECK(back.lengths->train == 300);
        REQUIRE(back.genome);
        CHECK(*back.genome == *c.genome);
        CHECK(experiment_config_to_json(back) == experiment_config_to_json(c));
    }

    TEST_CASE("partial lengths fall back to task defaults") {
        const auto c = experiment_config_from_json(
            {{"task", "narma10"}, {"architecture", "shallow"}, {"lengths", {{"train", 500}}}});
        const auto d = task_defaults(TaskKind::narma10).lengths;
        CHECK(c.lengths->train == 500);
        CHECK(c.lengths->washout == d.washout);
        CHECK(c.lengths->test == d.test);
    }

    TEST_CASE("invalid documents") {
        CHECK_THROWS_AS(experiment_config_from_json({{"architecture", "deep"}}), ParseError);
        CHECK_THROWS_AS(experiment_config_from_json({{"task", "narma10"}, {"architecture", "tall"}}),
                        ArgumentError);
        CHECK_THROWS_AS(experiment_config_from_json(
                            {{"task", "narma10"}, {"architecture", "shallow"}, {"n_subs", 3}}),
                        ArgumentError);
        CHECK_THROWS_AS(experiment_config_from_json({{"task", "santa_fe"}, {"architecture", "deep"}}),
                        ArgumentError);
        CHECK_THROWS_AS(experiment_config_from_json({{"task", "narma10"},
                                                     {"architecture", "deep"},
                                                     {"n_subs", 2},
                                                     {"genome", {0.5, 0.5, 0.5}}}),
                        ArgumentError);
        CHECK_THROWS_AS(experiment_config_from_json(
                            {{"task", "narma10"}, {"architecture", "deep"}, {"total_nodes", "big"}}),
                        ParseError);
    }

    TEST_CASE("config files") {
        const auto dir = scratch_dir("config_files");
        CHECK_THROWS_AS(load_experiment_config(dir / "missing.json"), FileNotFoundError);
        write_file(dir / "broken.json", "{\"task\": ");
        CHECK_THROWS_AS(load_experiment_config(dir / "broken.json"), ParseError);
        write_file(dir / "ok.json", tiny_config(dir).dump());
        CHECK(load_experiment_config(dir / "ok.json").n_subs == 2);
    }
}

TEST_SUITE("seeds and stats") {
    TEST_CASE("seed plan streams are distinct and derived") {
        const auto p = derive_seed_plan(42);
        CHECK(p.task == derive_seed(42, 1));
        CHECK(p.ga == derive_seed(42, 2));
        CHECK(p.fitness == derive_seed(42, 3));
        CHECK(p.final_base == derive_seed(42, 4));
        CHECK(p.analysis == derive_seed(42, 5));
        CHECK(p.final_seed(3) == derive_seed(p.final_base, 3));
        std::set<std::uint64_t> all{p.task, p.ga, p.fitness, p.final_base, p.analysis};
        for (std::size_t i = 0; i < 10; ++i) all.insert(p.final_seed(i));
        CHECK(all.size() == 15);
        CHECK(derive_seed_plan(43).task != p.task);
    }

    TEST_CASE("summary uses linear interpolation") {
        const auto s = summarize({4.0, 1.0, 3.0, 2.0});
        CHECK(s.min == 1.0);
        CHECK(s.p25 == 1.75);
        CHECK(s.median == 2.5);
        CHECK(s.p75 == 3.25);
        CHECK(s.max == 4.0);
        CHECK(s.mean == 2.5);
        const auto one = summarize({0.3});
        CHECK(one.min == 0.3);
        CHECK(one.median == 0.3);
        CHECK(one.max == 0.3);
        CHECK_THROWS_AS(summarize({}), ArgumentError);
    }

    TEST_CASE("summary orders on random samples") {
        SeededRng rng(8);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(1 + rng.index(30));
            for (auto& x : v) x = rng.uniform(-5.0, 5.0);
            const auto s = summarize(v);
            CHECK(s.min <= s.p25);
            CHECK(s.p25 <= s.median);
            CHECK(s.median <= s.p75);
            CHECK(s.p75 <= s.max);
            CHECK(s.mean >= s.min);
            CHECK(s.mean <= s.max);
        }
    }
}

TEST_SUITE("task splits") {
    TEST_CASE("generated tasks have the requested layout") {
        const SplitLengths lengths{20, 100, 10, 30};
        for (TaskKind task : {TaskKind::narma10, TaskKind::mackey_glass, TaskKind::mso12}) {
            const auto split = make_task_split(task, lengths, 3, "");
            CHECK(split.input.rows() == 160);
            CHECK(split.target.rows() == 160);
            CHECK(split.lengths == lengths);
        }
    }

    TEST_CASE("seeded and reproducible") {
        const SplitLengths lengths{20, 100, 10, 30};
        const auto a = make_task_split(TaskKind::narma10, lengths, 3, "");
        const auto b = make_task_split(TaskKind::narma10, lengths, 3, "");
        const auto c = make_task_split(TaskKind::narma10, lengths, 4, "");
        CHECK(a.input == b.input);
        CHECK(a.input != c.input);
    }

    TEST_CASE("santa fe needs a readable file of sufficient length") {
        const SplitLengths lengths{2, 5, 2, 2};
        CHECK_THROWS_AS(make_task_split(TaskKind::santa_fe, lengths, 0, ""), ArgumentError);
        const auto dir = scratch_dir("santa_fe");
        CHECK_THROWS_AS(make_task_split(TaskKind::santa_fe, lengths, 0, (dir / "none.dat").string()),
                        FileNotFoundError);
        std::ostringstream data;
        for (int i = 0; i < 20; ++i) data << (i * 7) % 13 << '\n';
        write_file(dir / "sf.dat", data.str());
        const auto split = make_task_split(TaskKind::santa_fe, lengths, 0, (dir / "sf.dat").string());
        CHECK(split.input.rows() == 11);
        CHECK(split.input.minCoeff() >= 0.0);
        CHECK(split.input.maxCoeff() <= 1.0);
        CHECK_THROWS_AS(make_task_split(TaskKind::santa_fe, SplitLengths{10, 10, 5, 5}, 0,
                                        (dir / "sf.dat").string()),
                        InsufficientDataError);
    }
}

TEST_SUITE("matrix") {
    TEST_CASE("size sweep cells") {
        ExperimentConfig base;
        base.out_dir = "/tmp/sweep";
        const auto cells = size_sweep(base, {200, 300}, {TaskKind::narma10, TaskKind::mackey_glass});
        REQUIRE(cells.size() == 12);
        for (const auto& c : cells) {
            if (c.architecture == Architecture::shallow) CHECK(c.n_subs == 1);
            else CHECK(c.n_subs == c.total_nodes / 100);
        }
        std::set<std::string> dirs;
        for (const auto& c : cells) dirs.insert(c.out_dir);
        CHECK(dirs.size() == 12);
    }

    TEST_CASE("subs sweep cells") {
        const auto cells = subs_sweep(ExperimentConfig{}, {2, 3, 4, 5}, {TaskKind::narma10});
        REQUIRE(cells.size() == 9);
        CHECK(cells[0].architecture == Architecture::shallow);
        for (const auto& c : cells) CHECK(c.total_nodes == 300);
    }

    TEST_CASE("matrix documents") {
        MatrixOptions options;
        const auto preset = matrix_from_json(
            {{"preset", "subs_sweep"}, {"tasks", {"mackey_glass"}}, {"n_subs", {2, 3}}, {"reuse_genome", true}},
            &options);
        CHECK(preset.size() == 5);
        CHECK(options.reuse_genome);
        const auto array = matrix_from_json(nlohmann::json::array({tiny_config("/tmp/a"), tiny_config("/tmp/b")}),
                                            nullptr);
        CHECK(array.size() == 2);
        CHECK_THROWS_AS(matrix_from_json({{"preset", "diagonal"}}, nullptr), ParseError);
        CHECK_THROWS_AS(matrix_from_json({{"sizes", {1}}}, nullptr), ParseError);
    }

    TEST_CASE("resize genome repeats the last triple") {
        const Genome g{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
        const auto up = resize_genome(g, 3);
        CHECK(up.genes == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.4, 0.5, 0.6});
        CHECK(resize_genome(g, 1).genes == std::vector<double>{0.1, 0.2, 0.3});
        CHECK_THROWS_AS(resize_genome(g, 0), ArgumentError);
    }

    TEST_CASE("a failing cell does not stop the others") {
        const auto dir = scratch_dir("matrix_run");
        auto good = experiment_config_from_json(tiny_config(dir / "good"));
        auto bad = good;
        bad.task = TaskKind::santa_fe;
        bad.data_path = (dir / "missing.dat").string();
        bad.out_dir = (dir / "bad").string();
        MatrixOptions options;
        options.matrix_csv = (dir / "matrix.csv").string();
        const auto cells = run_matrix({good, bad}, options);
        REQUIRE(cells.size() == 2);
        CHECK(cells[0].result);
        CHECK(!cells[1].result);
        CHECK(cells[1].error.find("missing.dat") != std::string::npos);
        const auto csv = slurp(dir / "matrix.csv");
        CHECK(csv.rfind("architecture,total_nodes,n_subs,task,seed,nrmse\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    }
}

TEST_SUITE("experiment") {
    TEST_CASE("artifacts and byte-identical replay") {
        const auto dir = scratch_dir("experiment");
        const auto c = experiment_config_from_json(tiny_config(dir / "a"));
        const auto a = run_experiment(c, 1);
        const auto first_result = slurp(dir / "a" / "result.json");
        const auto first_seeds = slurp(dir / "a" / "seeds.csv");
        const auto b = run_experiment(c, 2);
        CHECK(a.test_nrmse == b.test_nrmse);
        CHECK(a.genome == b.genome);
        CHECK(a.ga.history.size() == 5);
        CHECK(a.seeds.size() == 3);
        for (const char* name : {"result.json", "seeds.csv", "ga_history.csv", "timing.json"}) {
            CHECK(fs::exists(dir / "a" / name));
        }
        CHECK(slurp(dir / "a" / "result.json") == first_result);
        CHECK(slurp(dir / "a" / "seeds.csv") == first_seeds);
        const auto doc = nlohmann::json::parse(slurp(dir / "a" / "result.json"));
        CHECK(!doc.contains("wall_clock_seconds"));
    }

    TEST_CASE("supplied genome skips the GA") {
        auto c = experiment_config_from_json(tiny_config(""));
        c.out_dir.clear();
        c.genome = Genome{{0.5, 0.9, 0.9, 0.5, 0.9, 0.9}};
        const auto r = run_experiment(c, 1);
        CHECK(r.ga.history.empty());
        CHECK(r.genome == *c.genome);
        CHECK(std::isfinite(r.validation_nrmse));
        CHECK(r.stats.median > 0.0);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit with 2") {
        CHECK(run_cli({}) == 2);
        CHECK(run_cli({"frobnicate"}) == 2);
        CHECK(run_cli({"generate"}) == 2);
        CHECK(run_cli({"generate", "narma10", "--length", "ten", "--out", "x.csv"}) == 2);
        CHECK(run_cli({"--help"}) == 0);
    }

    TEST_CASE("runtime errors exit with 1") {
        const auto dir = scratch_dir("cli_errors");
        CHECK(run_cli({"generate", "lorenz", "--out", (dir / "x.csv").string()}) == 1);
        CHECK(run_cli({"experiment", (dir / "missing.json").string()}) == 1);
        CHECK(run_cli({"generate", "santa_fe", "--out", (dir / "x.csv").string()}) == 1);
    }

    TEST_CASE("generate writes the series") {
        const auto dir = scratch_dir("cli_generate");
        CHECK(run_cli({"generate", "narma10", "--length", "50", "--seed", "3", "--out",
                       (dir / "n.csv").string()}) == 0);
        const auto text = slurp(dir / "n.csv");
        CHECK(text.rfind("t,u,y\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 51);
        CHECK(run_cli({"generate", "mso12", "--length", "10", "--out", (dir / "m.csv").string()}) == 0);
        CHECK(slurp(dir / "m.csv").rfind("t,value\n0,0", 0) == 0);
    }

    TEST_CASE("optimize, evaluate and analyze") {
        const auto dir = scratch_dir("cli_pipeline");
        write_file(dir / "cfg.json", tiny_config(dir / "run").dump());
        const auto cfg = (dir / "cfg.json").string();
        CHECK(run_cli({"optimize", "--config", cfg, "--generations", "3"}) == 0);
        const auto ga = nlohmann::json::parse(slurp(dir / "run" / "ga_result.json"));
        CHECK(ga.at("history").size() == 3);
        CHECK(fs::exists(dir / "run" / "network.json"));

        CHECK(run_cli({"evaluate", "--config", cfg, "--genome", (dir / "run" / "ga_result.json").string(),
                       "--out", (dir / "eval").string(), "--seeds", "2"}) == 0);
        const auto result = nlohmann::json::parse(slurp(dir / "eval" / "result.json"));
        CHECK(result.dump().find(ga.at("best_genome").dump()) != std::string::npos);

        const auto net = (dir / "run" / "network.json").string();
        CHECK(run_cli({"analyze", "mc", "--network", net, "--out", (dir / "mc").string(), "--k", "20"}) == 0);
        CHECK(nlohmann::json::parse(slurp(dir / "mc" / "mc.json")).at("r2").size() == 20);
        CHECK(run_cli({"analyze", "spectrum", "--network", net, "--out", (dir / "sp").string(),
                       "--mso-length", "1124", "--fft-len", "1024"}) == 0);
        CHECK(fs::exists(dir / "sp" / "spectrum_peaks.csv"));
        CHECK(run_cli({"analyze", "states", "--network", net, "--out", (dir / "st").string(),
                       "--task", "narma10"}) == 0);
        CHECK(fs::exists(dir / "st" / "states.csv"));
    }

    TEST_CASE("matrix exit status reflects failed cells") {
        const auto dir = scratch_dir("cli_matrix");
        auto bad = tiny_config(dir / "bad");
        bad["task"] = "santa_fe";
        bad["data_path"] = (dir / "missing.dat").string();
        write_file(dir / "ok.json", nlohmann::json::array({tiny_config(dir / "ok")}).dump());
        write_file(dir / "mixed.json", nlohmann::json::array({tiny_config(dir / "ok"), bad}).dump());
        CHECK(run_cli({"matrix", (dir / "ok.json").string(), "--out", (dir / "o1").string()}) == 0);
        CHECK(fs::exists(dir / "o1" / "matrix.csv"));
        CHECK(run_cli({"matrix", (dir / "mixed.json").string(), "--out", (dir / "o2").string()}) == 1);
    }
}
