#ifndef BIRDCAST_FORECAST_HPP
#define BIRDCAST_FORECAST_HPP

#include "birdcast/data.hpp"
#include "birdcast/geo.hpp"
#include "birdcast/nn.hpp"

#include <functional>
#include <vector>

namespace birdcast::forecast {

// One-step predictor over a scaled window; the recursion shifts the window
// and appends each prediction before the next call.
using StepPredictor = std::function<double(const Vector& window)>;

Vector recursive_forecast(const StepPredictor& step, Vector window,
                          Index horizon);

// Raw-coordinate block forecaster: given the input window (raw degrees,
// oldest first) and the series index of the first sample to predict,
// produce `horizon` raw predictions. The index argument lets test doubles
// (e.g. a truth-reading oracle) locate the block; models ignore it.
using BlockForecaster =
    std::function<Vector(const Vector& window, Index target_start,
                         Index horizon)>;

// Wraps a trained network: scales the window, runs one forward pass per
// predicted step (many-to-one) or a single multi-step pass
// (encoder-decoder), and unscales. Copies the model into the closure.
BlockForecaster model_forecaster(const nn::TrainedModel& model);

// Returns the ground truth of the series axis; the reference predictor for
// pipeline tests and the --oracle flag.
BlockForecaster perfect_forecaster(const data::TrackSeries& series,
                                   geo::Axis axis);

// Forecast `horizon` values following the end of `window` (raw degrees).
Vector model_forecast(const nn::TrainedModel& model, const Vector& window,
                      Index horizon);

// ---------------------------------------------------------------------------
// Partitioned evaluation. Within one test partition the first input_horizon
// samples only seed the first window; predictions then cover consecutive
// non-overlapping blocks of `horizon` samples, each forecast from the true
// (not predicted) window that precedes it.
// ---------------------------------------------------------------------------

struct PartitionEvaluation {
  Index blocks = 0;
  Index first_target = 0;           // series index of the first prediction
  double mae_m = 0.0;               // over every predicted sample
  std::vector<double> per_step_mae_m;  // horizon entries, step k of each block
  Vector predictions;               // blocks*horizon raw values, in order
};

PartitionEvaluation evaluate_partition(const BlockForecaster& forecaster,
                                       const data::TrackSeries& partition,
                                       geo::Axis axis, Index input_horizon,
                                       Index horizon);

struct EvaluationReport {
  geo::Axis axis = geo::Axis::Lat;
  Index horizon = 0;
  std::vector<PartitionEvaluation> partitions;
  double overall_mae_m = 0.0;  // weighted over all predicted samples
};

EvaluationReport evaluate(const nn::TrainedModel& model,
                          const data::TrackSeries& test, Index num_partitions,
                          Index horizon);

EvaluationReport evaluate_with(const BlockForecaster& forecaster,
                               geo::Axis axis,
                               const data::TrackSeries& test,
                               Index num_partitions, Index input_horizon,
                               Index horizon);

// Mean absolute error of a curve fitted to the time axis, measured over all
// samples of the partition (how the regression baselines are scored).
double curve_mae_m(const std::function<double(double)>& curve,
                   const data::TrackSeries& partition, geo::Axis axis);

}  // namespace birdcast::forecast

#endif  // BIRDCAST_FORECAST_HPP
