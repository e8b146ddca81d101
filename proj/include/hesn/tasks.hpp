#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hesn/linalg.hpp"

namespace hesn {

struct TimeSeries {
    std::string name;
    std::vector<double> values;
    double dt = 1.0;

    std::size_t size() const noexcept { return values.size(); }
};

enum class TaskKind { narma10, santa_fe, mackey_glass, mso12 };

std::string to_string(TaskKind task);
TaskKind parse_task(std::string_view name);

// --- NARMA10 -------------------------------------------------------------

/// Response of the 10th-order NARMA system to the drive `u`. Returns n + 1
/// values y(0..n) with y(0) = 0 and terms at negative times taken as zero:
///   y(t+1) = 0.3 y(t) + 0.05 y(t) sum_{i=0}^{9} y(t-i) + 1.5 u(t-9) u(t) + 0.1
std::vector<double> narma10_response(std::span<const double> u);

struct Narma10Series {
    TimeSeries input;   // u(t), t = 0..length-1
    TimeSeries output;  // y(t) on the same time axis; predict y(t+1) from u(t)
};

inline constexpr std::size_t narma10_settling_steps = 200;
inline constexpr std::size_t narma10_max_draws = 1000;

/// u(t) i.i.d. uniform over [0, 0.5). The first narma10_settling_steps steps
/// are generated and dropped so the returned window starts on the attractor.
/// A draw whose response reaches |y| >= 1 anywhere is rejected and the input
/// is drawn again from the same stream; ConvergenceError after
/// narma10_max_draws rejections.
Narma10Series gen_narma10(std::size_t length, std::uint64_t seed);

// --- Mackey-Glass ---------------------------------------------------------

struct MackeyGlassParams {
    double tau = 17.0;
    double dt = 0.1;
    std::size_t subsample = 10;      // integration steps per returned sample
    double transient = 1000.0;       // time units discarded before sampling
    double history = 1.2;            // constant history on [-tau, 0]
    double history_noise = 1e-4;     // half-width of uniform perturbation
};

// dy/dt = 0.2 y(t - tau) / (1 + y(t - tau)^10) - 0.1 y(t)
double mackey_glass_rhs(double y, double y_delayed);

/// One RK4 step; the delayed values are taken at t, t + dt/2 and t + dt.
double mackey_glass_rk4_step(double y, double delayed_now, double delayed_half,
                             double delayed_next, double dt);

/// Fixed-step RK4 with linear interpolation into the delay buffer.
TimeSeries gen_mackey_glass(std::size_t length, const MackeyGlassParams& params,
                            std::uint64_t seed);
TimeSeries gen_mackey_glass(std::size_t length, double tau, double dt, std::size_t subsample,
                            std::uint64_t seed);

// --- MSO12 -----------------------------------------------------------------

const std::array<double, 12>& mso12_frequencies();

/// u(t) = sum_i sin(phi_i t) for t = offset .. offset + length - 1.
TimeSeries gen_mso12(std::size_t length, std::size_t offset = 0);

// --- Santa Fe laser --------------------------------------------------------

/// Loads one sample per line (blank lines skipped) and min-max normalizes to
/// [0, 1]. Throws FileNotFoundError, ParseError (with line number),
/// InsufficientDataError when fewer than `min_length` samples, and
/// DegenerateInputError for a constant file.
TimeSeries load_santa_fe(const std::filesystem::path& path, std::size_t min_length = 2);

// --- Splits ------------------------------------------------------------------

struct SplitLengths {
    std::size_t washout = 100;
    std::size_t train = 3000;
    std::size_t validation = 100;
    std::size_t test = 1000;

    std::size_t total() const noexcept { return washout + train + validation + test; }
    bool operator==(const SplitLengths&) const = default;
};

struct SegmentRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
};

/// Aligned input/target rows laid out washout | train | validation | test.
/// Row t pairs input(t) with target(t + horizon) of the source series.
/// The validation and test segments are scored after a fresh state is run
/// through the `washout` rows immediately preceding them.
struct DatasetSplit {
    Matrix input;
    Matrix target;
    SplitLengths lengths;
    std::size_t horizon = 1;

    SegmentRange train() const noexcept {
        return {lengths.washout, lengths.washout + lengths.train};
    }
    SegmentRange validation() const noexcept {
        const auto b = lengths.washout + lengths.train;
        return {b, b + lengths.validation};
    }
    SegmentRange test() const noexcept {
        const auto b = lengths.washout + lengths.train + lengths.validation;
        return {b, b + lengths.test};
    }
};

/// Throws InsufficientDataError naming the shortfall when
/// lengths.total() + horizon exceeds the shorter series.
DatasetSplit split_dataset(const TimeSeries& input, const TimeSeries& target,
                           const SplitLengths& lengths, std::size_t horizon);

struct TaskDefaults {
    SplitLengths lengths;
    std::size_t horizon = 1;
    bool append_raw_input = false;
};

TaskDefaults task_defaults(TaskKind task);

// CSV with header "t,value" (or t,u,y for NARMA10).
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_narma10_csv(const std::filesystem::path& path, const Narma10Series& series);

} // namespace hesn
