#include "hesn/evaluation.hpp"

#include "hesn/errors.hpp"

namespace hesn {

EvalSettings eval_settings_for(TaskKind task, double lambda) {
    EvalSettings s;
    s.lambda = lambda;
    s.features.append_bias = true;
    s.features.append_raw_input = task_defaults(task).append_raw_input;
    return s;
}

TrainedModel fit_model(ReservoirNetwork net, const DatasetSplit& split,
                       const EvalSettings& settings) {
    const auto end = static_cast<Eigen::Index>(split.train().end);
    const Matrix inputs = split.input.topRows(end);
    const auto trace = run_sequence(net, inputs, true);
    auto readout = train_readout(trace, inputs, split.target.topRows(end), split.lengths.washout,
                                 settings.features, settings.lambda);
    return {std::move(net), std::move(readout)};
}

Matrix predict_segment(TrainedModel& model, const DatasetSplit& split, SegmentRange segment) {
    const std::size_t transient = split.lengths.washout;
    if (segment.begin < transient || segment.end > static_cast<std::size_t>(split.input.rows()) ||
        segment.size() == 0)
        throw ArgumentError("predict_segment: segment outside the split");
    const auto start = static_cast<Eigen::Index>(segment.begin - transient);
    const auto rows = static_cast<Eigen::Index>(segment.end) - start;
    const Matrix inputs = split.input.middleRows(start, rows);
    const auto trace = run_sequence(model.net, inputs, true);
    const Matrix predicted = predict_sequence(model.readout, trace, inputs);
    return predicted.bottomRows(static_cast<Eigen::Index>(segment.size()));
}

double segment_nrmse(TrainedModel& model, const DatasetSplit& split, SegmentRange segment) {
    const Matrix predicted = predict_segment(model, split, segment);
    const Eigen::VectorXd p = predicted.col(0);
    const Eigen::VectorXd t = split.target.block(static_cast<Eigen::Index>(segment.begin), 0,
                                                 static_cast<Eigen::Index>(segment.size()), 1);
    return nrmse(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                 std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
}

} // namespace hesn
