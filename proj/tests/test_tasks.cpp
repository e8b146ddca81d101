#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hesn/errors.hpp"
#include "hesn/tasks.hpp"

using namespace hesn;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents, const std::string& name = "series.txt") {
        path = fs::temp_directory_path() / ("hesn_tasks_" + std::to_string(::getpid()) + "_" + name);
        std::ofstream(path) << contents;
    }
    ~TempFile() { fs::remove(path); }
};

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Forward Euler on the delay equation with the delay landing on grid points.
std::vector<double> euler_mackey_glass(double history, double tau, double dt, double horizon) {
    const auto lag = static_cast<std::size_t>(std::llround(tau / dt));
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    std::vector<double> y(lag + 1 + steps, history);
    for (std::size_t n = lag; n < lag + steps; ++n) {
        const double d = y[n - lag];
        y[n + 1] = y[n] + dt * (0.2 * d / (1.0 + std::pow(d, 10)) - 0.1 * y[n]);
    }
    return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(lag), y.end());
}

} // namespace

TEST_SUITE("narma10") {
    TEST_CASE("first step from a zero history") {
        const std::vector<double> u(20, 0.3);
        const auto y = narma10_response(u);
        REQUIRE(y.size() == 21);
        CHECK(y[0] == 0.0);
        CHECK(y[1] == doctest::Approx(0.1));
        // u(t - 9) becomes nonzero at t = 9.
        const double y9 = y[9];
        double window = 0.0;
        for (int i = 0; i < 10; ++i) window += y[9 - i];
        CHECK(y[10] == doctest::Approx(0.3 * y9 + 0.05 * y9 * window + 1.5 * 0.09 + 0.1));
    }

    TEST_CASE("zero input converges to the fixed point") {
        const auto y = narma10_response(std::vector<double>(3000, 0.0));
        CHECK(std::fabs(y.back() - (0.7 - std::sqrt(0.29))) < 1e-6);
        CHECK(y.back() == doctest::Approx(0.16148351928654958).epsilon(1e-9));
    }

    TEST_CASE("seeded and bounded") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto a = gen_narma10(10000, seed);
            const auto b = gen_narma10(10000, seed);
            CHECK(a.input.values == b.input.values);
            CHECK(a.output.values == b.output.values);
            for (double v : a.output.values) REQUIRE(std::fabs(v) < 1.0);
            for (double v : a.input.values) REQUIRE((v >= 0.0 && v < 0.5));
        }
        CHECK(gen_narma10(100, 1).input.values != gen_narma10(100, 2).input.values);
        CHECK_THROWS_AS(gen_narma10(10, 1), ArgumentError);
    }

    TEST_CASE("output obeys the recurrence on the returned window") {
        const auto s = gen_narma10(500, 3);
        const auto& u = s.input.values;
        const auto& y = s.output.values;
        for (std::size_t t = 9; t + 1 < y.size(); ++t) {
            double window = 0.0;
            for (std::size_t i = 0; i < 10; ++i) window += y[t - i];
            CHECK(y[t + 1] == doctest::Approx(0.3 * y[t] + 0.05 * y[t] * window +
                                              1.5 * u[t - 9] * u[t] + 0.1)
                                  .epsilon(1e-12));
        }
    }
}

TEST_SUITE("mackey-glass") {
    TEST_CASE("constant histories are fixed points") {
        MackeyGlassParams one;
        one.history = 1.0;
        one.history_noise = 0.0;
        for (double v : gen_mackey_glass(500, one, 0).values) CHECK(std::fabs(v - 1.0) < 1e-9);
        MackeyGlassParams zero = one;
        zero.history = 0.0;
        for (double v : gen_mackey_glass(500, zero, 0).values) CHECK(v == 0.0);
        CHECK(mackey_glass_rk4_step(1.0, 1.0, 1.0, 1.0, 0.1) == 1.0);
    }

    TEST_CASE("agrees with a fine-step Euler integrator over 200 time units") {
        MackeyGlassParams p;
        p.transient = 0.0;
        p.history_noise = 0.0;
        const auto rk4 = gen_mackey_glass(201, p, 0).values;
        const auto euler = euler_mackey_glass(1.2, 17.0, 0.01, 200.0);
        double worst = 0.0;
        for (std::size_t t = 0; t <= 200; ++t) worst = std::max(worst, std::fabs(rk4[t] - euler[t * 100]));
        CHECK(worst < 1e-2);
    }

    TEST_CASE("tau 17 is aperiodic") {
        const auto y = gen_mackey_glass(2500, MackeyGlassParams{}, 4).values;
        for (std::size_t period = 1; period <= 500; ++period) {
            double worst = 0.0;
            for (std::size_t t = 0; t < 2000; ++t) worst = std::max(worst, std::fabs(y[t] - y[t + period]));
            CAPTURE(period);
            CHECK(worst >= 1e-3);
        }
    }

    TEST_CASE("seeded, in range, and argument checked") {
        const auto a = gen_mackey_glass(300, MackeyGlassParams{}, 9);
        CHECK(a.values == gen_mackey_glass(300, MackeyGlassParams{}, 9).values);
        CHECK(a.values != gen_mackey_glass(300, MackeyGlassParams{}, 10).values);
        for (double v : a.values) CHECK((v > 0.1 && v < 1.6));
        CHECK_THROWS_AS(gen_mackey_glass(10, 17.0, 0.0, 10, 1), ArgumentError);
        CHECK_THROWS_AS(gen_mackey_glass(10, -1.0, 0.1, 10, 1), ArgumentError);
        CHECK_THROWS_AS(gen_mackey_glass(10, 17.0, 0.1, 5, 1), ArgumentError);
        CHECK_NOTHROW(gen_mackey_glass(10, 17.0, 0.05, 20, 1));
    }
}

TEST_SUITE("mso12") {
    TEST_CASE("reference values") {
        const auto s = gen_mso12(1000);
        CHECK(s.values[0] == 0.0);
        CHECK(s.values[1] == doctest::Approx(7.9933374571829905).epsilon(1e-14));
        for (double v : s.values) CHECK(std::fabs(v) <= 12.0);
        CHECK(mso12_frequencies().front() == 0.2);
        CHECK(mso12_frequencies().back() == 1.32);
    }

    TEST_CASE("high-precision reference sums") {
        const std::pair<std::size_t, double> reference[] = {
            {17, 0.3443646759890339082},   {777, 0.2026559818458517706},
            {2048, 3.8867079725571310534}, {4195, 0.020291193563398210092},
            {5016, 0.03448618103122327627}};
        const auto s = gen_mso12(5017);
        for (const auto& [t, want] : reference) CHECK(std::fabs(s.values[t] - want) < 1e-12);
    }

    TEST_CASE("offset continues the same signal") {
        const auto whole = gen_mso12(200);
        const auto tail = gen_mso12(50, 150);
        for (std::size_t k = 0; k < 50; ++k) CHECK(tail.values[k] == whole.values[150 + k]);
    }
}

TEST_SUITE("santa fe") {
    TEST_CASE("min-max normalization") {
        TempFile f("0\n5\n\n10\n");
        const auto s = load_santa_fe(f.path);
        CHECK(s.values == std::vector<double>{0.0, 0.5, 1.0});
    }

    TEST_CASE("distinct errors") {
        CHECK_THROWS_AS(load_santa_fe("/nonexistent/santa_fe.txt"), FileNotFoundError);
        TempFile constant("3\n3\n3\n", "constant.txt");
        CHECK_THROWS_AS(load_santa_fe(constant.path), DegenerateInputError);
        TempFile garbage("1\n2\nabc\n4\n", "garbage.txt");
        try {
            load_santa_fe(garbage.path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
        TempFile short_file("1\n2\n3\n", "short.txt");
        CHECK_THROWS_AS(load_santa_fe(short_file.path, 5100), InsufficientDataError);
        CHECK_THROWS_AS(load_santa_fe(short_file.path, 5100), DataError);
    }

    TEST_CASE("values stay in [0, 1] and length is preserved") {
        std::string text;
        for (int i = 0; i < 300; ++i) text += std::to_string(40 + (i * 37) % 211) + "\n";
        TempFile f(text, "long.txt");
        const auto s = load_santa_fe(f.path);
        CHECK(s.size() == 300);
        for (double v : s.values) CHECK((v >= 0.0 && v <= 1.0));
        CHECK(s.values[0] == doctest::Approx((40.0 - 40.0) / 210.0));
        CHECK(s.values[1] == doctest::Approx((77.0 - 40.0) / 210.0));
    }
}

TEST_SUITE("splits") {
    TEST_CASE("task defaults") {
        const auto narma = task_defaults(TaskKind::narma10);
        CHECK(narma.lengths == SplitLengths{100, 3000, 100, 1000});
        CHECK(narma.horizon == 1);
        CHECK(narma.append_raw_input);
        const auto mg = task_defaults(TaskKind::mackey_glass);
        CHECK(mg.lengths == SplitLengths{100, 1000, 1000, 1000});
        CHECK(mg.horizon == 84);
        CHECK(task_defaults(TaskKind::santa_fe).lengths == SplitLengths{100, 3000, 1000, 1000});
    }

    TEST_CASE("segments are contiguous and targets are shifted by the horizon") {
        TimeSeries s{"ramp", {}, 1.0};
        for (int i = 0; i < 100; ++i) s.values.push_back(i);
        const SplitLengths lengths{5, 40, 10, 20};
        const auto split = split_dataset(s, s, lengths, 7);
        CHECK(split.input.rows() == 75);
        CHECK(split.train().begin == 5);
        CHECK(split.validation().begin == split.train().end);
        CHECK(split.test().begin == split.validation().end);
        CHECK(split.test().end == 75);
        for (Eigen::Index t = 0; t < 75; ++t) CHECK(split.target(t, 0) - split.input(t, 0) == 7.0);
    }

    TEST_CASE("NARMA targets are the next output") {
        const auto s = gen_narma10(500, 2);
        const auto split = split_dataset(s.input, s.output, SplitLengths{10, 100, 50, 50}, 1);
        for (Eigen::Index t = 0; t < 210; ++t) {
            CHECK(split.input(t, 0) == s.input.values[static_cast<std::size_t>(t)]);
            CHECK(split.target(t, 0) == s.output.values[static_cast<std::size_t>(t) + 1]);
        }
    }

    TEST_CASE("insufficient data names the shortfall") {
        TimeSeries s{"short", std::vector<double>(100, 1.0), 1.0};
        try {
            split_dataset(s, s, SplitLengths{10, 50, 20, 20}, 5);
            FAIL("expected InsufficientDataError");
        } catch (const InsufficientDataError& e) {
            CHECK(std::string(e.what()).find("105") != std::string::npos);
        }
    }
}

TEST_SUITE("csv") {
    TEST_CASE("series and NARMA export") {
        const fs::path dir = fs::temp_directory_path() / ("hesn_csv_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        write_series_csv(dir / "mso.csv", gen_mso12(3));
        const std::string mso = read_all(dir / "mso.csv");
        CHECK(mso.rfind("t,value\n0,0", 0) == 0);
        write_narma10_csv(dir / "narma.csv", gen_narma10(12, 1));
        const std::string narma = read_all(dir / "narma.csv");
        CHECK(narma.rfind("t,u,y\n", 0) == 0);
        CHECK(std::count(narma.begin(), narma.end(), '\n') == 13);
        fs::remove_all(dir);
    }

    TEST_CASE("task names") {
        for (TaskKind k : {TaskKind::narma10, TaskKind::santa_fe, TaskKind::mackey_glass, TaskKind::mso12})
            CHECK(parse_task(to_string(k)) == k);
        CHECK_THROWS_AS(parse_task("narma20"), ArgumentError);
    }
}
