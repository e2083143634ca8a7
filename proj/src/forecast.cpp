#include "birdcast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace birdcast::forecast {

Vector recursive_forecast(const StepPredictor& step, Vector window,
                          Index horizon) {
  if (window.size() < 1) throw std::invalid_argument("empty seed window");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Vector out(horizon);
  for (Index k = 0; k < horizon; ++k) {
    const double next = step(window);
    out(k) = next;
    // shift left one step, append the prediction
    const Index len = window.size();
    window.head(len - 1) = window.tail(len - 1).eval();
    window(len - 1) = next;
  }
  return out;
}

BlockForecaster model_forecaster(const nn::TrainedModel& model) {
  return [model](const Vector& window, Index, Index horizon) {
    return model_forecast(model, window, horizon);
  };
}

Vector model_forecast(const nn::TrainedModel& model, const Vector& window,
                      Index horizon) {
  if (window.size() != model.spec.input_horizon)
    throw std::invalid_argument(
        "window has " + std::to_string(window.size()) +
        " samples, model expects " +
        std::to_string(model.spec.input_horizon));
  const Vector scaled = model.scaler.scale(window);
  if (model.spec.prediction_horizon == 1) {
    StepPredictor one = [&model](const Vector& win) {
      return nn::forward_one(model.spec, model.weights, win)(0);
    };
    return model.scaler.unscale(recursive_forecast(one, scaled, horizon));
  }
  // Multi-step model: one direct pass per block of M predictions, feeding
  // each block back into the window, truncated to the requested horizon.
  const Index m = model.spec.prediction_horizon;
  const Index len = scaled.size();
  Vector rolling = scaled;
  Vector out(horizon);
  Index done = 0;
  while (done < horizon) {
    const Vector block = nn::forward_one(model.spec, model.weights, rolling);
    const Index take = std::min(m, horizon - done);
    out.segment(done, take) = block.head(take);
    done += take;
    if (done < horizon) {
      if (m >= len) {
        rolling = block.tail(len);
      } else {
        rolling.head(len - m) = rolling.tail(len - m).eval();
        rolling.tail(m) = block;
      }
    }
  }
  return model.scaler.unscale(out);
}

BlockForecaster perfect_forecaster(const data::TrackSeries& series,
                                   geo::Axis axis) {
  Vector truth = series.axis(axis);
  return [truth](const Vector&, Index target_start, Index horizon) {
    if (target_start < 0 || target_start + horizon > truth.size())
      throw std::out_of_range("forecast block leaves the series");
    return Vector(truth.segment(target_start, horizon));
  };
}

PartitionEvaluation evaluate_partition(const BlockForecaster& forecaster,
                                       const data::TrackSeries& partition,
                                       geo::Axis axis, Index input_horizon,
                                       Index horizon) {
  const Index n = partition.size();
  if (input_horizon < 1 || horizon < 1)
    throw std::invalid_argument("horizons must be >= 1");
  if (n < input_horizon + horizon)
    throw std::invalid_argument(
        "partition has " + std::to_string(n) +
        " samples, need at least " + std::to_string(input_horizon + horizon) +
        " for one forecast block");

  const Vector& truth = partition.axis(axis);
  const geo::GeoRef ref{partition.lat.mean()};
  const Index blocks = (n - input_horizon) / horizon;

  PartitionEvaluation ev;
  ev.blocks = blocks;
  ev.first_target = input_horizon;
  ev.per_step_mae_m.assign(static_cast<std::size_t>(horizon), 0.0);
  ev.predictions.resize(blocks * horizon);

  double total_abs_m = 0.0;
  for (Index b = 0; b < blocks; ++b) {
    const Index target_start = input_horizon + b * horizon;
    const Vector window = truth.segment(target_start - input_horizon,
                                        input_horizon);
    const Vector pred = forecaster(window, target_start, horizon);
    if (pred.size() != horizon)
      throw std::runtime_error("forecaster returned " +
                               std::to_string(pred.size()) +
                               " samples, expected " + std::to_string(horizon));
    ev.predictions.segment(b * horizon, horizon) = pred;
    for (Index k = 0; k < horizon; ++k) {
      const double err_m = std::abs(
          geo::deg_to_m(pred(k) - truth(target_start + k), axis, ref));
      ev.per_step_mae_m[static_cast<std::size_t>(k)] += err_m;
      total_abs_m += err_m;
    }
  }
  for (double& v : ev.per_step_mae_m) v /= static_cast<double>(blocks);
  ev.mae_m = total_abs_m / static_cast<double>(blocks * horizon);
  return ev;
}

EvaluationReport evaluate_with(const BlockForecaster& forecaster,
                               geo::Axis axis, const data::TrackSeries& test,
                               Index num_partitions, Index input_horizon,
                               Index horizon) {
  EvaluationReport report;
  report.axis = axis;
  report.horizon = horizon;
  const auto parts = data::partition_test_windows(test, num_partitions);
  double weighted = 0.0;
  Index samples = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    PartitionEvaluation ev;
    try {
      ev = evaluate_partition(forecaster, parts[i], axis, input_horizon,
                              horizon);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("test partition " + std::to_string(i + 1) +
                                  ": " + e.what());
    }
    weighted += ev.mae_m * static_cast<double>(ev.blocks * horizon);
    samples += ev.blocks * horizon;
    report.partitions.push_back(std::move(ev));
  }
  report.overall_mae_m = weighted / static_cast<double>(samples);
  return report;
}

EvaluationReport evaluate(const nn::TrainedModel& model,
                          const data::TrackSeries& test, Index num_partitions,
                          Index horizon) {
  return evaluate_with(model_forecaster(model), model.axis, test,
                       num_partitions, model.spec.input_horizon, horizon);
}

double curve_mae_m(const std::function<double(double)>& curve,
                   const data::TrackSeries& partition, geo::Axis axis) {
  if (partition.size() < 1) throw std::invalid_argument("empty partition");
  const geo::GeoRef ref{partition.lat.mean()};
  const Vector& truth = partition.axis(axis);
  double total = 0.0;
  for (Index i = 0; i < partition.size(); ++i)
    total += std::abs(
        geo::deg_to_m(curve(partition.t(i)) - truth(i), axis, ref));
  return total / static_cast<double>(partition.size());
}

}  // namespace birdcast::forecast
