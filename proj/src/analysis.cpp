#include "hesn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <string>

#include "hesn/errors.hpp"
#include "hesn/fft.hpp"
#include "hesn/ridge.hpp"
#include "hesn/rng.hpp"
#include "hesn/stats.hpp"
#include "hesn/tasks.hpp"

namespace hesn {

namespace {

Matrix column_input(std::span<const double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
    return m;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

} // namespace

double StateDistribution::max_abs_mean(std::size_t l) const {
    double best = 0.0;
    for (const auto& node : subs.at(l)) best = std::max(best, std::abs(node.mean));
    return best;
}

StateDistribution node_state_distribution(ReservoirNetwork& net, const Matrix& inputs,
                                          std::size_t washout) {
    if (static_cast<std::size_t>(inputs.rows()) < washout + min_distribution_steps)
        throw ArgumentError("node_state_distribution: need at least " +
                            std::to_string(min_distribution_steps) + " steps after the washout");
    const auto trace = run_sequence(net, inputs, true);
    const auto rows = static_cast<Eigen::Index>(trace.steps() - washout);
    const Matrix kept = trace.states.bottomRows(rows);

    StateDistribution dist;
    for (std::size_t l = 0; l < trace.n_subs(); ++l) {
        std::vector<NodeStat> nodes;
        for (std::size_t c = trace.offsets[l]; c < trace.offsets[l + 1]; ++c) {
            const Eigen::VectorXd column = kept.col(static_cast<Eigen::Index>(c));
            const std::span<const double> values(column.data(), static_cast<std::size_t>(rows));
            nodes.push_back({mean(values), population_stddev(values)});
        }
        std::stable_sort(nodes.begin(), nodes.end(),
                         [](const NodeStat& a, const NodeStat& b) { return a.mean < b.mean; });
        dist.subs.push_back(std::move(nodes));
    }
    return dist;
}

std::size_t expected_bin(double phi, std::size_t fft_len) {
    return static_cast<std::size_t>(
        std::llround(static_cast<double>(fft_len) * phi / (2.0 * std::numbers::pi)));
}

SpectrumProfile spectrum_for_drive(ReservoirNetwork& net, std::span<const double> drive,
                                   std::span<const double> phis, const SpectrumOptions& options) {
    if (!is_power_of_two(options.fft_len) || options.fft_len < 2)
        throw ArgumentError("spectrum: fft_len must be a power of two >= 2, got " +
                            std::to_string(options.fft_len));
    if (drive.size() < options.fft_len + options.washout)
        throw ArgumentError("spectrum: drive of " + std::to_string(drive.size()) +
                            " steps is shorter than fft_len + washout");
    if (phis.empty()) throw ArgumentError("spectrum: no frequencies to locate");

    const auto trace = run_sequence(net, column_input(drive), true);
    const std::size_t bins = options.fft_len / 2 + 1;

    SpectrumProfile profile;
    profile.fft_len = options.fft_len;
    for (double phi : phis) {
        const std::size_t bin = expected_bin(phi, options.fft_len);
        if (bin >= bins) throw ArgumentError("spectrum: frequency above Nyquist");
        profile.expected_bins.push_back(bin);
    }

    std::vector<double> node_series(options.fft_len);
    for (std::size_t l = 0; l < trace.n_subs(); ++l) {
        std::vector<double> average(bins, 0.0);
        for (std::size_t c = trace.offsets[l]; c < trace.offsets[l + 1]; ++c) {
            for (std::size_t t = 0; t < options.fft_len; ++t)
                node_series[t] = trace.states(static_cast<Eigen::Index>(options.washout + t),
                                              static_cast<Eigen::Index>(c));
            const auto magnitude = fft_magnitude(node_series, options.fft_len);
            for (std::size_t k = 0; k < bins; ++k) average[k] += magnitude[k];
        }
        const double count = static_cast<double>(trace.sub_size(l));
        for (auto& v : average) v /= count;

        std::vector<std::size_t> peak_bins;
        std::vector<double> peaks;
        for (std::size_t bin : profile.expected_bins) {
            const std::size_t lo = bin > options.peak_halfwidth ? bin - options.peak_halfwidth : 0;
            const std::size_t hi = std::min(bins - 1, bin + options.peak_halfwidth);
            std::size_t best = lo;
            for (std::size_t k = lo; k <= hi; ++k)
                if (average[k] > average[best]) best = k;
            peak_bins.push_back(best);
            peaks.push_back(average[best]);
        }
        const double floor = *std::min_element(peaks.begin(), peaks.end());
        if (!(floor > 0.0))
            throw DegenerateInputError("spectrum: sub-reservoir " + std::to_string(l) +
                                       " has a zero peak; cannot normalize");
        std::vector<double> normalized;
        for (double p : peaks) normalized.push_back(p / floor);

        profile.spectra.push_back(std::move(average));
        profile.peak_bins.push_back(std::move(peak_bins));
        profile.peaks.push_back(std::move(peaks));
        profile.normalized_peaks.push_back(std::move(normalized));
    }
    return profile;
}

SpectrumProfile sub_reservoir_spectrum(ReservoirNetwork& net, const SpectrumOptions& options) {
    if (options.mso_length < options.fft_len + options.washout)
        throw ArgumentError("spectrum: mso_length must be >= fft_len + washout");
    const auto drive = gen_mso12(options.mso_length, options.time_offset);
    const auto& phis = mso12_frequencies();
    return spectrum_for_drive(net, drive.values, phis, options);
}

SpectrumProfile sub_reservoir_spectrum(ReservoirNetwork& net, std::size_t mso_length,
                                       std::size_t fft_len) {
    SpectrumOptions options;
    options.mso_length = mso_length;
    options.fft_len = fft_len;
    return sub_reservoir_spectrum(net, options);
}

MemoryCapacityResult memory_capacity(ReservoirNetwork& net, double lambda, std::size_t max_delay,
                                     std::uint64_t seed, const MemoryCapacityOptions& options) {
    if (max_delay < 1) throw ArgumentError("memory_capacity: K must be >= 1");
    if (net.topology().input_dim != 1)
        throw DimensionError("memory_capacity: network must take a scalar input");
    if (options.washout + 1 < max_delay)
        throw ArgumentError("memory_capacity: washout must be >= K - 1");
    if (options.train < 2 || options.evaluation < 2)
        throw ArgumentError("memory_capacity: train and evaluation need >= 2 steps");

    const std::size_t total = options.washout + options.train + options.evaluation;
    SeededRng rng(seed);
    std::vector<double> u(total);
    for (auto& v : u) v = rng.uniform(-options.input_amplitude, options.input_amplitude);

    const auto trace = run_sequence(net, column_input(u), true);
    const auto width = static_cast<Eigen::Index>(trace.readout_width);
    const auto delays = static_cast<Eigen::Index>(max_delay);

    auto design = [&](std::size_t begin, std::size_t count) {
        Matrix f(static_cast<Eigen::Index>(count), width + 1);
        f.leftCols(width) = trace.states.block(static_cast<Eigen::Index>(begin), 0,
                                               static_cast<Eigen::Index>(count), width);
        f.col(width).setOnes();
        return f;
    };
    auto delayed_targets = [&](std::size_t begin, std::size_t count) {
        Matrix y(static_cast<Eigen::Index>(count), delays);
        for (std::size_t r = 0; r < count; ++r)
            for (std::size_t k = 0; k < max_delay; ++k)
                y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = u[begin + r - k];
        return y;
    };

    const std::size_t eval_begin = options.washout + options.train;
    // Columns are independent, so one multi-output solve equals K separate readouts.
    const Matrix w_out = ridge_solve(design(options.washout, options.train),
                                     delayed_targets(options.washout, options.train), lambda);
    const Matrix predicted = design(eval_begin, options.evaluation) * w_out.transpose();
    const Matrix actual = delayed_targets(eval_begin, options.evaluation);

    MemoryCapacityResult result;
    for (Eigen::Index k = 0; k < delays; ++k) {
        const Eigen::VectorXd p = predicted.col(k);
        const Eigen::VectorXd a = actual.col(k);
        double r2 = 0.0;
        try {
            r2 = squared_correlation(std::span<const double>(p.data(), options.evaluation),
                                     std::span<const double>(a.data(), options.evaluation));
        } catch (const DegenerateInputError&) {
            r2 = 0.0;
        }
        result.r2.push_back(r2);
        result.total += r2;
    }
    return result;
}

void write_state_distribution_csv(const std::filesystem::path& path,
                                  const StateDistribution& dist) {
    auto out = open_csv(path);
    out << "sub_reservoir,node_rank,mean,std\n";
    for (std::size_t l = 0; l < dist.subs.size(); ++l)
        for (std::size_t r = 0; r < dist.subs[l].size(); ++r)
            out << l << ',' << r << ',' << dist.subs[l][r].mean << ',' << dist.subs[l][r].stddev
                << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumProfile& profile) {
    auto out = open_csv(path);
    out << "sub_reservoir,bin,magnitude\n";
    for (std::size_t l = 0; l < profile.spectra.size(); ++l)
        for (std::size_t k = 0; k < profile.spectra[l].size(); ++k)
            out << l << ',' << k << ',' << profile.spectra[l][k] << '\n';
}

void write_spectrum_peaks_csv(const std::filesystem::path& path, const SpectrumProfile& profile,
                              std::span<const double> phis) {
    auto out = open_csv(path);
    out << "sub_reservoir,component_index,phi,normalized_peak\n";
    for (std::size_t l = 0; l < profile.normalized_peaks.size(); ++l)
        for (std::size_t i = 0; i < profile.normalized_peaks[l].size(); ++i)
            out << l << ',' << i + 1 << ',' << (i < phis.size() ? phis[i] : 0.0) << ','
                << profile.normalized_peaks[l][i] << '\n';
}

void write_memory_capacity_csv(const std::filesystem::path& path,
                               const MemoryCapacityResult& result) {
    auto out = open_csv(path);
    out << "k,r2\n";
    for (std::size_t k = 0; k < result.r2.size(); ++k) out << k + 1 << ',' << result.r2[k] << '\n';
}

nlohmann::json memory_capacity_to_json(const MemoryCapacityResult& result) {
    return {{"format", "hier-esn/memory-capacity"},
            {"version", 1},
            {"max_delay", result.max_delay()},
            {"total", result.total},
            {"r2", result.r2}};
}

} // namespace hesn
