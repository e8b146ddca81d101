#include "hesn/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hesn/errors.hpp"
#include "hesn/rng.hpp"

namespace hesn {

std::string to_string(TaskKind task) {
    switch (task) {
    case TaskKind::narma10: return "narma10";
    case TaskKind::santa_fe: return "santa_fe";
    case TaskKind::mackey_glass: return "mackey_glass";
    case TaskKind::mso12: return "mso12";
    }
    return "unknown";
}

TaskKind parse_task(std::string_view name) {
    if (name == "narma10") return TaskKind::narma10;
    if (name == "santa_fe") return TaskKind::santa_fe;
    if (name == "mackey_glass") return TaskKind::mackey_glass;
    if (name == "mso12") return TaskKind::mso12;
    throw ArgumentError("unknown task '" + std::string(name) +
                        "' (expected narma10, santa_fe, mackey_glass or mso12)");
}

std::vector<double> narma10_response(std::span<const double> u) {
    const std::size_t n = u.size();
    std::vector<double> y(n + 1, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double window = 0.0;
        for (std::size_t i = 0; i < 10 && i <= t; ++i) window += y[t - i];
        const double u_lag = t >= 9 ? u[t - 9] : 0.0;
        y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * window + 1.5 * u_lag * u[t] + 0.1;
    }
    return y;
}

Narma10Series gen_narma10(std::size_t length, std::uint64_t seed) {
    if (length < 11) throw ArgumentError("gen_narma10: length must be >= 11");
    SeededRng rng(seed);
    std::vector<double> u(length + narma10_settling_steps);
    std::vector<double> y;
    // Some input draws push the system out of its bounded regime (and on to
    // overflow). Those draws are discarded and the stream continues.
    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt == narma10_max_draws)
            throw ConvergenceError("gen_narma10: no bounded realization in " +
                                       std::to_string(narma10_max_draws) + " draws",
                                   0.0);
        for (auto& v : u) v = rng.uniform(0.0, 0.5);
        y = narma10_response(u);
        if (std::all_of(y.begin(), y.end(), [](double v) { return std::fabs(v) < 1.0; })) break;
        spdlog::debug("gen_narma10: seed {} draw {} left |y| < 1, redrawing", seed, attempt);
    }

    Narma10Series out;
    out.input.name = "narma10_u";
    out.output.name = "narma10_y";
    const auto first = static_cast<std::ptrdiff_t>(narma10_settling_steps);
    const auto last = first + static_cast<std::ptrdiff_t>(length);
    out.input.values.assign(u.begin() + first, u.begin() + last);
    out.output.values.assign(y.begin() + first, y.begin() + last);
    return out;
}

double mackey_glass_rhs(double y, double y_delayed) {
    return 0.2 * y_delayed / (1.0 + std::pow(y_delayed, 10)) - 0.1 * y;
}

double mackey_glass_rk4_step(double y, double delayed_now, double delayed_half,
                             double delayed_next, double dt) {
    const double k1 = mackey_glass_rhs(y, delayed_now);
    const double k2 = mackey_glass_rhs(y + 0.5 * dt * k1, delayed_half);
    const double k3 = mackey_glass_rhs(y + 0.5 * dt * k2, delayed_half);
    const double k4 = mackey_glass_rhs(y + dt * k3, delayed_next);
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TimeSeries gen_mackey_glass(std::size_t length, const MackeyGlassParams& p, std::uint64_t seed) {
    if (!(p.dt > 0.0)) throw ArgumentError("gen_mackey_glass: dt must be > 0");
    if (!(p.tau > 0.0)) throw ArgumentError("gen_mackey_glass: tau must be > 0");
    if (p.subsample == 0) throw ArgumentError("gen_mackey_glass: subsample must be >= 1");
    if (std::abs(static_cast<double>(p.subsample) * p.dt - 1.0) > 1e-9)
        throw ArgumentError("gen_mackey_glass: subsample * dt must equal 1");
    if (!(p.transient >= 0.0)) throw ArgumentError("gen_mackey_glass: transient must be >= 0");

    // Grid index i corresponds to time (i - history_steps) * dt.
    const auto history_steps = static_cast<std::size_t>(std::ceil(p.tau / p.dt - 1e-9));
    const auto transient_steps = static_cast<std::size_t>(std::llround(p.transient / p.dt));
    const std::size_t sample_steps = length == 0 ? 0 : (length - 1) * p.subsample;
    const std::size_t total_steps = transient_steps + sample_steps;

    SeededRng rng(seed);
    std::vector<double> grid(history_steps + 1 + total_steps);
    for (std::size_t i = 0; i <= history_steps; ++i) {
        grid[i] = p.history;
        if (p.history_noise > 0.0) grid[i] += rng.uniform(-p.history_noise, p.history_noise);
    }

    // y(s) for s <= current time, linearly interpolated on the grid.
    const double origin = static_cast<double>(history_steps);
    auto delayed = [&](double time) {
        const double pos = std::max(origin + time / p.dt, 0.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 >= grid.size()) return grid[lo];
        return grid[lo] + frac * (grid[lo + 1] - grid[lo]);
    };

    for (std::size_t n = 0; n < total_steps; ++n) {
        const double t = static_cast<double>(n) * p.dt;
        const std::size_t i = history_steps + n;
        grid[i + 1] = mackey_glass_rk4_step(grid[i], delayed(t - p.tau),
                                            delayed(t + 0.5 * p.dt - p.tau),
                                            delayed(t + p.dt - p.tau), p.dt);
    }

    TimeSeries out;
    out.name = "mackey_glass";
    out.dt = 1.0;
    out.values.reserve(length);
    for (std::size_t k = 0; k < length; ++k)
        out.values.push_back(grid[history_steps + transient_steps + k * p.subsample]);
    return out;
}

TimeSeries gen_mackey_glass(std::size_t length, double tau, double dt, std::size_t subsample,
                            std::uint64_t seed) {
    MackeyGlassParams p;
    p.tau = tau;
    p.dt = dt;
    p.subsample = subsample;
    return gen_mackey_glass(length, p, seed);
}

const std::array<double, 12>& mso12_frequencies() {
    static const std::array<double, 12> phi = {0.2,  0.331, 0.42, 0.51, 0.63, 0.74,
                                               0.85, 0.97,  1.08, 1.19, 1.27, 1.32};
    return phi;
}

namespace {

// The frequencies are exact thousandths; forming phi * t from the integer
// product avoids the representation error of phi growing with t.
constexpr std::array<long long, 12> mso12_milli_frequencies = {200, 331, 420,  510,  630,  740,
                                                               850, 970, 1080, 1190, 1270, 1320};

} // namespace

TimeSeries gen_mso12(std::size_t length, std::size_t offset) {
    TimeSeries out;
    out.name = "mso12";
    out.values.resize(length);
    for (std::size_t k = 0; k < length; ++k) {
        const auto t = static_cast<long long>(offset + k);
        long double sum = 0.0L;
        for (long long p : mso12_milli_frequencies) sum += std::sin(static_cast<long double>(p * t) / 1000.0L);
        out.values[k] = static_cast<double>(sum);
    }
    return out;
}

TimeSeries load_santa_fe(const std::filesystem::path& path, std::size_t min_length) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("Santa Fe data file not found: " + path.string());

    TimeSeries out;
    out.name = "santa_fe";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(first, last - first + 1);
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed != token.size() || !std::isfinite(value))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": not a number: '" + token + "'");
        out.values.push_back(value);
    }
    if (out.values.size() < std::max<std::size_t>(min_length, 1))
        throw InsufficientDataError(path.string() + " has " + std::to_string(out.values.size()) +
                                    " samples, need at least " + std::to_string(min_length));

    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    const double min = *lo;
    const double range = *hi - *lo;
    if (range == 0.0)
        throw DegenerateInputError(path.string() + ": constant series cannot be normalized");
    for (auto& v : out.values) v = (v - min) / range;
    return out;
}

DatasetSplit split_dataset(const TimeSeries& input, const TimeSeries& target,
                           const SplitLengths& lengths, std::size_t horizon) {
    if (lengths.train == 0 || lengths.validation < 2 || lengths.test < 2)
        throw ArgumentError("split_dataset: train must be >= 1 and validation/test >= 2");
    const std::size_t needed = lengths.total() + horizon;
    const std::size_t available = std::min(input.size(), target.size());
    if (needed > available)
        throw InsufficientDataError("split needs " + std::to_string(needed) + " samples (" +
                                    std::to_string(lengths.total()) + " + horizon " +
                                    std::to_string(horizon) + ") but only " +
                                    std::to_string(available) + " are available; short by " +
                                    std::to_string(needed - available));
    DatasetSplit split;
    split.lengths = lengths;
    split.horizon = horizon;
    const auto rows = static_cast<Eigen::Index>(lengths.total());
    split.input.resize(rows, 1);
    split.target.resize(rows, 1);
    for (Eigen::Index t = 0; t < rows; ++t) {
        split.input(t, 0) = input.values[static_cast<std::size_t>(t)];
        split.target(t, 0) = target.values[static_cast<std::size_t>(t) + horizon];
    }
    return split;
}

TaskDefaults task_defaults(TaskKind task) {
    switch (task) {
    case TaskKind::narma10: return {{100, 3000, 100, 1000}, 1, true};
    case TaskKind::santa_fe: return {{100, 3000, 1000, 1000}, 1, false};
    case TaskKind::mackey_glass: return {{100, 1000, 1000, 1000}, 84, false};
    case TaskKind::mso12: return {{100, 1000, 1000, 1000}, 1, false};
    }
    throw ArgumentError("unknown task");
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "t,value\n" << std::setprecision(17);
    for (std::size_t t = 0; t < series.values.size(); ++t) out << t << ',' << series.values[t] << '\n';
}

void write_narma10_csv(const std::filesystem::path& path, const Narma10Series& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "t,u,y\n" << std::setprecision(17);
    for (std::size_t t = 0; t < series.input.values.size(); ++t)
        out << t << ',' << series.input.values[t] << ',' << series.output.values[t] << '\n';
}

} // namespace hesn
