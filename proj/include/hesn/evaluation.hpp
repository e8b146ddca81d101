#pragma once

#include <cstdint>

#include "hesn/readout.hpp"
#include "hesn/reservoir.hpp"
#include "hesn/tasks.hpp"

namespace hesn {

struct EvalSettings {
    double lambda = default_ridge_lambda;
    FeatureSpec features;
};

EvalSettings eval_settings_for(TaskKind task, double lambda = default_ridge_lambda);

struct TrainedModel {
    ReservoirNetwork net;
    Readout readout;
};

/// Runs washout + train rows from a zero state and fits the readout on the
/// train rows.
TrainedModel fit_model(ReservoirNetwork net, const DatasetSplit& split,
                       const EvalSettings& settings);

/// Predictions for a scored segment: the state is reset, the `washout` rows
/// before the segment are run as a transient, and only the segment rows are
/// returned (segment.size() x N_Y).
Matrix predict_segment(TrainedModel& model, const DatasetSplit& split, SegmentRange segment);

double segment_nrmse(TrainedModel& model, const DatasetSplit& split, SegmentRange segment);

} // namespace hesn
