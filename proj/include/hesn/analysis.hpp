#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hesn/linalg.hpp"
#include "hesn/readout.hpp"
#include "hesn/reservoir.hpp"

namespace hesn {

// --- Node-state distribution ----------------------------------------------

struct NodeStat {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Per sub-reservoir, (mean, std) of each node's state, sorted ascending by mean.
struct StateDistribution {
    std::vector<std::vector<NodeStat>> subs;

    // Largest |mean| over the nodes of sub-reservoir l.
    double max_abs_mean(std::size_t l) const;
};

inline constexpr std::size_t min_distribution_steps = 100;

/// Runs `inputs` from a zero state, drops the first `washout` steps and
/// summarizes the rest (population std). At least min_distribution_steps
/// steps must remain.
StateDistribution node_state_distribution(ReservoirNetwork& net, const Matrix& inputs,
                                          std::size_t washout);

// --- Frequency spectra ------------------------------------------------------

struct SpectrumProfile {
    std::size_t fft_len = 0;
    std::vector<std::vector<double>> spectra;   // per sub: averaged |FFT|, fft_len/2 + 1 bins
    std::vector<std::size_t> expected_bins;     // round(fft_len * phi / 2pi) per component
    std::vector<std::vector<std::size_t>> peak_bins;         // per sub, per component
    std::vector<std::vector<double>> peaks;                  // raw peak magnitudes
    std::vector<std::vector<double>> normalized_peaks;       // peaks / min(peaks)
};

struct SpectrumOptions {
    std::size_t mso_length = 4196;
    std::size_t fft_len = 4096;
    std::size_t washout = 100;
    std::size_t peak_halfwidth = 2;  // bins searched either side of the expected bin
    std::size_t time_offset = 0;     // start time of the MSO drive
};

std::size_t expected_bin(double phi, std::size_t fft_len);

/// Drives the network with `drive`, drops `washout` steps, takes the FFT
/// magnitude of each node over the next fft_len steps and averages within
/// each sub-reservoir; peaks are located for each angular frequency in `phis`.
SpectrumProfile spectrum_for_drive(ReservoirNetwork& net, std::span<const double> drive,
                                   std::span<const double> phis, const SpectrumOptions& options);

/// spectrum_for_drive with the MSO12 signal and its 12 frequencies.
SpectrumProfile sub_reservoir_spectrum(ReservoirNetwork& net, const SpectrumOptions& options = {});
SpectrumProfile sub_reservoir_spectrum(ReservoirNetwork& net, std::size_t mso_length,
                                       std::size_t fft_len);

// --- Memory capacity ----------------------------------------------------------

struct MemoryCapacityOptions {
    std::size_t washout = 200;
    std::size_t train = 1000;
    std::size_t evaluation = 1000;
    double input_amplitude = 0.5;  // u(t) uniform over [-a, a)
};

struct MemoryCapacityResult {
    std::vector<double> r2;  // r2[k-1] for delay k = 1..K
    double total = 0.0;

    std::size_t max_delay() const noexcept { return r2.size(); }
};

/// Delay k reconstructs the k-th most recent input, u(t - k + 1), from the
/// state x(t) plus a bias through its own ridge readout; r2_k is the squared
/// correlation on the held-out evaluation rows (0 when degenerate).
MemoryCapacityResult memory_capacity(ReservoirNetwork& net, double lambda, std::size_t max_delay,
                                     std::uint64_t seed, const MemoryCapacityOptions& options = {});

// --- Export -------------------------------------------------------------------

void write_state_distribution_csv(const std::filesystem::path& path,
                                  const StateDistribution& dist);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumProfile& profile);
void write_spectrum_peaks_csv(const std::filesystem::path& path, const SpectrumProfile& profile,
                              std::span<const double> phis);
void write_memory_capacity_csv(const std::filesystem::path& path,
                               const MemoryCapacityResult& result);
nlohmann::json memory_capacity_to_json(const MemoryCapacityResult& result);

} // namespace hesn
