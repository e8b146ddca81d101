#include "hesn/readout.hpp"

#include <cmath>
#include <string>

#include "hesn/errors.hpp"
#include "hesn/ridge.hpp"

namespace hesn {

namespace {

constexpr const char* readout_format = "hier-esn/readout";
constexpr int readout_version = 1;

void check_alignment(const StateTrace& trace, const Matrix& inputs, const FeatureSpec& spec) {
    if (!spec.use_reservoir_state)
        throw ArgumentError("feature spec must use the reservoir state");
    if (inputs.rows() != trace.states.rows())
        throw DimensionError("inputs have " + std::to_string(inputs.rows()) +
                             " rows but the trace has " + std::to_string(trace.states.rows()));
}

} // namespace

Matrix build_features(const StateTrace& trace, const Matrix& inputs, const FeatureSpec& spec,
                      std::size_t first_row) {
    check_alignment(trace, inputs, spec);
    const auto rows = static_cast<Eigen::Index>(trace.steps()) - static_cast<Eigen::Index>(first_row);
    if (rows <= 0) throw ArgumentError("build_features: first_row beyond the trace");
    const auto start = static_cast<Eigen::Index>(first_row);
    const auto res_width = static_cast<Eigen::Index>(trace.readout_width);
    const auto in_dim = static_cast<Eigen::Index>(inputs.cols());

    Matrix features(rows, static_cast<Eigen::Index>(spec.width(trace.readout_width,
                                                               static_cast<std::size_t>(in_dim))));
    features.leftCols(res_width) = trace.states.block(start, 0, rows, res_width);
    Eigen::Index col = res_width;
    if (spec.append_raw_input) {
        features.middleCols(col, in_dim) = inputs.middleRows(start, rows);
        col += in_dim;
    }
    if (spec.append_bias) features.col(col).setOnes();
    return features;
}

Readout train_readout(const StateTrace& trace, const Matrix& inputs, const Matrix& targets,
                      std::size_t washout, const FeatureSpec& spec, double lambda) {
    if (washout >= trace.steps())
        throw ArgumentError("train_readout: washout " + std::to_string(washout) +
                            " leaves no rows of a " + std::to_string(trace.steps()) +
                            "-step trace");
    if (targets.rows() != trace.states.rows())
        throw DimensionError("train_readout: targets have " + std::to_string(targets.rows()) +
                             " rows but the trace has " + std::to_string(trace.states.rows()));
    const Matrix features = build_features(trace, inputs, spec, washout);
    const auto start = static_cast<Eigen::Index>(washout);

    Readout readout;
    readout.w_out = ridge_solve(features, targets.bottomRows(targets.rows() - start), lambda);
    readout.spec = spec;
    readout.lambda = lambda;
    readout.reservoir_width = trace.readout_width;
    readout.input_dim = static_cast<std::size_t>(inputs.cols());
    return readout;
}

Matrix predict_sequence(const Readout& readout, const StateTrace& trace, const Matrix& inputs) {
    if (trace.readout_width != readout.reservoir_width)
        throw DimensionError("predict_sequence: trace width " +
                             std::to_string(trace.readout_width) + " differs from readout width " +
                             std::to_string(readout.reservoir_width));
    if (static_cast<std::size_t>(inputs.cols()) != readout.input_dim)
        throw DimensionError("predict_sequence: input dimension mismatch");
    const Matrix features = build_features(trace, inputs, readout.spec, 0);
    if (features.cols() != readout.w_out.cols())
        throw DimensionError("predict_sequence: feature width mismatch");
    return features * readout.w_out.transpose();
}

double nrmse(std::span<const double> predicted, std::span<const double> target) {
    if (predicted.size() != target.size() || target.size() < 2)
        throw DimensionError("nrmse: need equal lengths >= 2, got " +
                             std::to_string(predicted.size()) + " and " +
                             std::to_string(target.size()));
    double sum = 0.0;
    for (double v : target) sum += v;
    const double mean = sum / static_cast<double>(target.size());
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) {
        numerator += (target[t] - predicted[t]) * (target[t] - predicted[t]);
        denominator += (target[t] - mean) * (target[t] - mean);
    }
    if (denominator == 0.0) throw DegenerateInputError("nrmse: target is constant");
    return std::sqrt(numerator / denominator);
}

nlohmann::json readout_to_json(const Readout& readout) {
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index i = 0; i < readout.w_out.rows(); ++i) {
        std::vector<double> row(readout.w_out.row(i).data(),
                                readout.w_out.row(i).data() + readout.w_out.cols());
        weights.push_back(row);
    }
    return {{"format", readout_format},
            {"version", readout_version},
            {"lambda", readout.lambda},
            {"reservoir_width", readout.reservoir_width},
            {"input_dim", readout.input_dim},
            {"features",
             {{"use_reservoir_state", readout.spec.use_reservoir_state},
              {"append_raw_input", readout.spec.append_raw_input},
              {"append_bias", readout.spec.append_bias}}},
            {"w_out", weights}};
}

Readout readout_from_json(const nlohmann::json& doc) {
    try {
        if (doc.value("format", std::string{}) != readout_format)
            throw ParseError("not a readout document (format field missing or wrong)");
        if (doc.at("version").get<int>() != readout_version)
            throw ParseError("unsupported readout document version");
        Readout r;
        r.lambda = doc.at("lambda").get<double>();
        r.reservoir_width = doc.at("reservoir_width").get<std::size_t>();
        r.input_dim = doc.at("input_dim").get<std::size_t>();
        const auto& f = doc.at("features");
        r.spec.use_reservoir_state = f.at("use_reservoir_state").get<bool>();
        r.spec.append_raw_input = f.at("append_raw_input").get<bool>();
        r.spec.append_bias = f.at("append_bias").get<bool>();
        const auto rows = doc.at("w_out").get<std::vector<std::vector<double>>>();
        const std::size_t width = r.spec.width(r.reservoir_width, r.input_dim);
        r.w_out.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != width) throw ParseError("readout weight row has wrong width");
            for (std::size_t j = 0; j < width; ++j)
                r.w_out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        if (!r.w_out.allFinite()) throw ParseError("readout weights are not finite");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid readout document: ") + e.what());
    }
}

} // namespace hesn
