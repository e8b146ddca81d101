#pragma once

#include <cstddef>
#include <span>

#include <nlohmann/json.hpp>

#include "hesn/linalg.hpp"
#include "hesn/reservoir.hpp"

namespace hesn {

/// Columns fed to the readout: reservoir state, then optionally the raw
/// input u(t), then optionally a constant 1.
struct FeatureSpec {
    bool use_reservoir_state = true;
    bool append_raw_input = false;
    bool append_bias = true;

    std::size_t width(std::size_t reservoir_width, std::size_t input_dim) const noexcept {
        return reservoir_width + (append_raw_input ? input_dim : 0) + (append_bias ? 1 : 0);
    }
    bool operator==(const FeatureSpec&) const = default;
};

struct Readout {
    Matrix w_out;  // N_Y x feature width
    FeatureSpec spec;
    double lambda = 1e-8;
    std::size_t reservoir_width = 0;
    std::size_t input_dim = 0;

    std::size_t outputs() const noexcept { return static_cast<std::size_t>(w_out.rows()); }
};

inline constexpr double default_ridge_lambda = 1e-8;

/// Design matrix rows [first_row, T) for `spec`.
Matrix build_features(const StateTrace& trace, const Matrix& inputs, const FeatureSpec& spec,
                      std::size_t first_row = 0);

/// Ridge-trains W_out on rows [washout, T) of the trace.
/// Throws ArgumentError when washout >= T, DimensionError on misaligned
/// inputs/targets, and propagates SingularityError from the solver.
Readout train_readout(const StateTrace& trace, const Matrix& inputs, const Matrix& targets,
                      std::size_t washout, const FeatureSpec& spec, double lambda);

/// Row t is W_out * feature(t), for every row of the trace.
Matrix predict_sequence(const Readout& readout, const StateTrace& trace, const Matrix& inputs);

/// sqrt( sum (target - predicted)^2 / sum (target - mean(target))^2 ).
/// Throws DimensionError on length mismatch or length < 2 and
/// DegenerateInputError for a constant target.
double nrmse(std::span<const double> predicted, std::span<const double> target);

nlohmann::json readout_to_json(const Readout& readout);
Readout readout_from_json(const nlohmann::json& doc);

} // namespace hesn
