// birdcast: train LSTM forecasters on GPS bird tracks, evaluate them in
// meters, forecast trajectories, and compute safe departure delays.

#include "birdcast/baseline.hpp"
#include "birdcast/data.hpp"
#include "birdcast/deconflict.hpp"
#include "birdcast/forecast.hpp"
#include "birdcast/format.hpp"
#include "birdcast/geo.hpp"
#include "birdcast/model_io.hpp"
#include "birdcast/nn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace birdcast;

namespace {

// ---------------------------------------------------------------------------
// Run configuration (training/evaluation pipeline settings)
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string data = "data/pigeon_track.csv";
  std::string output_dir = "out";
  data::SplitSpec split;
  Index input_horizon = 300;
  Index prediction_horizon = 30;  // multi-step width of encoder_decoder
  Index stride = 1;
  std::string model = "vanilla";
  std::vector<Index> layer_units;  // empty = per-model default
  std::string cell_activation = "relu";
  std::string loss = "mse";
  Index batch_size = 32;
  double learning_rate = 0.001;
  Index epochs = 100;
  std::uint64_t seed = 42;
  Index test_partitions = 5;
  Index forecast_horizon = 30;
  std::string axis = "lat";
};

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

  static const std::vector<std::string> known = {
      "data",          "output_dir",     "train_fraction",
      "val_fraction",  "test_fraction",  "split_counts",
      "input_horizon", "prediction_horizon", "stride",
      "model",         "layer_units",    "cell_activation",
      "loss",          "batch_size",     "learning_rate",
      "epochs",        "seed",           "test_partitions",
      "forecast_horizon", "axis"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::runtime_error("config: unknown key \"" + it.key() + "\"");

  RunConfig c;
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  get("data", c.data);
  get("output_dir", c.output_dir);
  get("train_fraction", c.split.train_fraction);
  get("val_fraction", c.split.val_fraction);
  get("test_fraction", c.split.test_fraction);
  if (j.contains("split_counts")) {
    auto v = j["split_counts"].get<std::vector<Index>>();
    if (v.size() != 3)
      throw std::runtime_error("config: split_counts needs 3 entries");
    c.split.explicit_counts = std::array<Index, 3>{v[0], v[1], v[2]};
  }
  get("input_horizon", c.input_horizon);
  get("prediction_horizon", c.prediction_horizon);
  get("stride", c.stride);
  get("model", c.model);
  get("layer_units", c.layer_units);
  get("cell_activation", c.cell_activation);
  get("loss", c.loss);
  get("batch_size", c.batch_size);
  get("learning_rate", c.learning_rate);
  get("epochs", c.epochs);
  get("seed", c.seed);
  get("test_partitions", c.test_partitions);
  get("forecast_horizon", c.forecast_horizon);
  get("axis", c.axis);
  return c;
}

// Layer sizes from the reference configuration when the config does not pin
// them: vanilla 30 (lat) / 50 (lon); stacked 16+8 (lat) / 32+8 (lon);
// bidirectional 32 per direction; encoder 32 / decoder 8.
std::vector<Index> default_units(nn::ModelKind kind, geo::Axis axis) {
  switch (kind) {
    case nn::ModelKind::Vanilla:
      return {axis == geo::Axis::Lat ? Index{30} : Index{50}};
    case nn::ModelKind::Stacked:
      return axis == geo::Axis::Lat ? std::vector<Index>{16, 8}
                                    : std::vector<Index>{32, 8};
    case nn::ModelKind::Bidirectional:
      return {32};
    case nn::ModelKind::EncoderDecoder:
      return {32, 8};
  }
  throw std::logic_error("bad ModelKind");
}

nn::ModelSpec model_spec_from(const RunConfig& c, geo::Axis axis) {
  nn::ModelSpec spec;
  spec.kind = nn::kind_from_string(c.model);
  spec.layer_units =
      c.layer_units.empty() ? default_units(spec.kind, axis) : c.layer_units;
  spec.input_horizon = c.input_horizon;
  spec.prediction_horizon =
      spec.kind == nn::ModelKind::EncoderDecoder ? c.prediction_horizon : 1;
  spec.cell_activation = num::activation_from_string(c.cell_activation);
  spec.seed = c.seed;
  spec.validate();
  return spec;
}

data::TrackSeries load_track(const std::string& path) {
  return data::interpolate_gaps(data::ingest_csv(path), 1.0);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary keeps LF on all hosts
  if (!out) throw std::runtime_error("cannot write: " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& csv, const std::string& out_path) {
  const data::TrackSeries raw = data::ingest_csv(csv);
  const data::TrackSeries track = data::interpolate_gaps(raw, 1.0);
  data::write_track_csv(track, out_path);
  std::cout << track.size() << " samples, " << (track.size() - raw.size())
            << " gaps filled\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const RunConfig& cfg) {
  const geo::Axis axis = geo::axis_from_string(cfg.axis);
  const nn::ModelSpec spec = model_spec_from(cfg, axis);
  nn::TrainOptions opts;
  opts.epochs = cfg.epochs;
  opts.batch_size = cfg.batch_size;
  opts.learning_rate = cfg.learning_rate;
  opts.loss = nn::loss_from_string(cfg.loss);
  if (opts.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (opts.batch_size < 1)
    throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.stride < 1) throw std::invalid_argument("stride must be >= 1");

  const data::TrackSeries track = load_track(cfg.data);
  cfg.split.validate(track.size());
  const data::SplitResult parts = data::split(track, cfg.split);

  const data::Scaler scaler = data::fit_scaler(parts.train.axis(axis));
  const data::WindowedDataset train_ds =
      data::make_windows(scaler.scale(parts.train.axis(axis)),
                         spec.input_horizon, spec.prediction_horizon,
                         cfg.stride);
  const data::WindowedDataset val_ds =
      data::make_windows(scaler.scale(parts.val.axis(axis)),
                         spec.input_horizon, spec.prediction_horizon,
                         cfg.stride);

  std::cout << "training " << nn::to_string(spec.kind) << " (" << cfg.axis
            << "): " << train_ds.count() << " train / " << val_ds.count()
            << " val windows, " << opts.epochs << " epochs\n";
  num::Rng rng(cfg.seed);
  nn::TrainedModel model = nn::train(spec, train_ds, val_ds, opts, rng);
  model.scaler = scaler;
  model.axis = axis;
  for (std::size_t e = 0; e < model.history.size(); ++e)
    std::cout << "epoch " << e << ": train " << model.history[e].train_loss
              << "  val " << model.history[e].val_loss << "\n";
  std::cout << "best epoch " << model.best_epoch << " (val "
            << model.history[static_cast<std::size_t>(model.best_epoch)]
                   .val_loss
            << ")\n";

  const std::string tag = nn::to_string(spec.kind) + "_" + cfg.axis;
  const fs::path model_path =
      fs::path(cfg.output_dir) / ("model_" + tag + ".json");
  const fs::path hist_path =
      fs::path(cfg.output_dir) / ("history_" + tag + ".csv");
  if (model_path.has_parent_path())
    fs::create_directories(model_path.parent_path());
  model_io::save_model(model, model_path.string());
  {
    std::ofstream out = open_out(hist_path);
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < model.history.size(); ++e)
      out << e << "," << fmt_double(model.history[e].train_loss) << ","
          << fmt_double(model.history[e].val_loss) << "\n";
  }
  std::cout << "wrote " << model_path.string() << " and " << hist_path.string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const RunConfig& cfg, const std::string& model_file,
                 bool oracle, std::optional<Index> partition) {
  const data::TrackSeries track = load_track(cfg.data);
  cfg.split.validate(track.size());
  const data::SplitResult parts = data::split(track, cfg.split);
  if (cfg.test_partitions < 1)
    throw std::invalid_argument("test_partitions must be >= 1");
  if (partition && (*partition < 1 || *partition > cfg.test_partitions))
    throw std::invalid_argument(
        "partition index " + std::to_string(*partition) + " outside 1.." +
        std::to_string(cfg.test_partitions));

  geo::Axis axis;
  forecast::BlockForecaster forecaster;
  Index input_horizon;
  std::string label;
  std::optional<nn::TrainedModel> model;
  if (oracle) {
    axis = geo::axis_from_string(cfg.axis);
    forecaster = forecast::perfect_forecaster(parts.test, axis);
    input_horizon = cfg.input_horizon;
    label = "oracle";
  } else {
    if (model_file.empty())
      throw std::invalid_argument("evaluate needs --model-file or --oracle");
    model = model_io::load_model(model_file);
    axis = model->axis;
    forecaster = forecast::model_forecaster(*model);
    input_horizon = model->spec.input_horizon;
    label = nn::to_string(model->spec.kind);
  }

  // The oracle reads the test series by absolute index, so score partitions
  // one at a time against forecasters anchored to each partition.
  forecast::EvaluationReport report;
  report.axis = axis;
  report.horizon = cfg.forecast_horizon;
  const auto pieces =
      data::partition_test_windows(parts.test, cfg.test_partitions);
  double weighted = 0.0;
  Index samples = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const forecast::BlockForecaster local =
        oracle ? forecast::perfect_forecaster(pieces[i], axis) : forecaster;
    forecast::PartitionEvaluation ev;
    try {
      ev = forecast::evaluate_partition(local, pieces[i], axis, input_horizon,
                                        cfg.forecast_horizon);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("test partition " + std::to_string(i + 1) +
                                  ": " + e.what());
    }
    weighted += ev.mae_m * static_cast<double>(ev.blocks * report.horizon);
    samples += ev.blocks * report.horizon;
    report.partitions.push_back(std::move(ev));
  }
  report.overall_mae_m = weighted / static_cast<double>(samples);

  // Regression baselines, fitted on the training span of the same axis.
  const baseline::PolyModel linear =
      baseline::fit_poly(parts.train.t, parts.train.axis(axis), 1);
  const baseline::PolyModel quartic =
      baseline::fit_poly(parts.train.t, parts.train.axis(axis), 4);

  const std::string axis_name = geo::to_string(axis);
  const fs::path out_dir(cfg.output_dir);
  std::ofstream mae_csv =
      open_out(out_dir / ("mae_" + label + "_" + axis_name + ".csv"));
  mae_csv << "partition,blocks,samples,mae_m,linear_mae_m,quartic_mae_m\n";

  std::cout << "MAE (" << label << ", " << axis_name << "), meters:\n";
  for (std::size_t i = 0; i < report.partitions.size(); ++i) {
    if (partition && static_cast<Index>(i + 1) != *partition) continue;
    const auto& ev = report.partitions[i];
    const double lin = forecast::curve_mae_m(
        [&linear](double t) { return linear.eval(t); }, pieces[i], axis);
    const double qua = forecast::curve_mae_m(
        [&quartic](double t) { return quartic.eval(t); }, pieces[i], axis);
    mae_csv << (i + 1) << "," << ev.blocks << ","
            << ev.blocks * report.horizon << "," << fmt_double(ev.mae_m) << ","
            << fmt_double(lin) << "," << fmt_double(qua) << "\n";
    std::cout << "  partition " << (i + 1) << ": " << ev.mae_m << " (linear "
              << lin << ", quartic " << qua << ")\n";
  }
  if (!partition) {
    mae_csv << "overall,,," << fmt_double(report.overall_mae_m) << ",,\n";
    std::cout << "  overall: " << report.overall_mae_m << "\n";
  }

  std::ofstream step_csv =
      open_out(out_dir / ("per_step_mae_" + label + "_" + axis_name + ".csv"));
  step_csv << "step";
  for (std::size_t i = 0; i < report.partitions.size(); ++i)
    step_csv << ",partition_" << (i + 1);
  step_csv << "\n";
  for (Index k = 0; k < report.horizon; ++k) {
    step_csv << (k + 1);
    for (const auto& ev : report.partitions)
      step_csv << ","
               << fmt_double(ev.per_step_mae_m[static_cast<std::size_t>(k)]);
    step_csv << "\n";
  }

  // Predicted vs actual series per partition, for plotting.
  for (std::size_t i = 0; i < report.partitions.size(); ++i) {
    if (partition && static_cast<Index>(i + 1) != *partition) continue;
    const auto& ev = report.partitions[i];
    std::ofstream pred_csv =
        open_out(out_dir / ("predictions_" + label + "_" + axis_name +
                            "_part" + std::to_string(i + 1) + ".csv"));
    pred_csv << "t_s,predicted,actual\n";
    for (Index k = 0; k < ev.predictions.size(); ++k) {
      const Index idx = ev.first_target + k;
      pred_csv << fmt_double(pieces[i].t(idx)) << ","
               << fmt_double(ev.predictions(k)) << ","
               << fmt_double(pieces[i].axis(axis)(idx)) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

struct AxisModels {
  nn::TrainedModel lat;
  nn::TrainedModel lon;
};

AxisModels load_axis_models(const std::string& lat_file,
                            const std::string& lon_file) {
  AxisModels m{model_io::load_model(lat_file), model_io::load_model(lon_file)};
  if (m.lat.axis != geo::Axis::Lat)
    throw std::invalid_argument("--model-lat file was trained for " +
                                geo::to_string(m.lat.axis));
  if (m.lon.axis != geo::Axis::Lon)
    throw std::invalid_argument("--model-lon file was trained for " +
                                geo::to_string(m.lon.axis));
  return m;
}

int cmd_forecast(const std::string& track_path, const std::string& lat_file,
                 const std::string& lon_file, bool oracle, Index t_start,
                 Index horizon, const std::string& out_path) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const data::TrackSeries track = load_track(track_path);

  Vector pred_lat, pred_lon;
  if (oracle) {
    if (t_start < 0 || t_start + horizon > track.size())
      throw std::invalid_argument("oracle forecast needs recorded truth over "
                                  "the whole horizon");
    pred_lat = track.lat.segment(t_start, horizon);
    pred_lon = track.lon.segment(t_start, horizon);
  } else {
    const AxisModels m = load_axis_models(lat_file, lon_file);
    const Index need = m.lat.spec.input_horizon;
    if (t_start < need)
      throw std::invalid_argument(
          "t_start " + std::to_string(t_start) + " has less than " +
          std::to_string(need) + " s of history");
    if (t_start > track.size())
      throw std::invalid_argument("t_start beyond the end of the track");
    pred_lat = forecast::model_forecast(
        m.lat, track.lat.segment(t_start - need, need), horizon);
    const Index need_lon = m.lon.spec.input_horizon;
    if (t_start < need_lon)
      throw std::invalid_argument(
          "t_start " + std::to_string(t_start) + " has less than " +
          std::to_string(need_lon) + " s of history");
    pred_lon = forecast::model_forecast(
        m.lon, track.lon.segment(t_start - need_lon, need_lon), horizon);
  }

  std::ofstream out = open_out(out_path);
  out << "t_s,predicted_lat,predicted_lon,true_lat,true_lon\n";
  const double t0 = track.t(0);
  for (Index k = 0; k < horizon; ++k) {
    const Index idx = t_start + k;
    out << fmt_double(t0 + static_cast<double>(idx)) << ","
        << fmt_double(pred_lat(k)) << "," << fmt_double(pred_lon(k));
    if (idx < track.size())
      out << "," << fmt_double(track.lat(idx)) << ","
          << fmt_double(track.lon(idx));
    else
      out << ",,";
    out << "\n";
  }
  std::cout << "wrote " << out_path << " (" << horizon << " steps from t="
            << t_start << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

json event_to_json(const deconflict::ConflictEvent& ev) {
  return json{{"t_s", ev.t},
              {"aircraft_lat", ev.aircraft_lat},
              {"aircraft_lon", ev.aircraft_lon},
              {"bird_lat", ev.bird_lat},
              {"bird_lon", ev.bird_lon},
              {"sep_lat_m", ev.sep_lat_m},
              {"sep_lon_m", ev.sep_lon_m}};
}

int cmd_simulate(const std::string& track_path, const std::string& runway_path,
                 const std::string& lat_file, const std::string& lon_file,
                 bool oracle, std::optional<Index> t_depart_opt,
                 const std::string& out_dir, bool euclidean) {
  const deconflict::DeconflictConfig cfg =
      deconflict::load_runway_config(runway_path);
  const data::TrackSeries track = load_track(track_path);

  const Index horizon = static_cast<Index>(std::floor(cfg.runway.t_roll_s)) +
                        static_cast<Index>(std::floor(cfg.max_delay_s)) + 1;

  // Departure defaults to the first second after the recorded track when a
  // model forecasts, or to the latest index that still leaves truth for the
  // whole horizon when the oracle replays recorded data.
  Index t_depart;
  if (t_depart_opt) {
    t_depart = *t_depart_opt;
  } else if (oracle) {
    t_depart = track.size() - horizon;
    if (t_depart < 0)
      throw std::invalid_argument("track shorter than the conflict horizon");
  } else {
    t_depart = track.size();
  }

  data::TrackSeries bird;
  bird.label = track.label;
  bird.t.resize(horizon);
  for (Index k = 0; k < horizon; ++k)
    bird.t(k) = track.t(0) + static_cast<double>(t_depart + k);

  if (oracle) {
    if (t_depart < 0 || t_depart + horizon > track.size())
      throw std::invalid_argument(
          "oracle simulation needs recorded truth over the whole horizon");
    bird.lat = track.lat.segment(t_depart, horizon);
    bird.lon = track.lon.segment(t_depart, horizon);
  } else {
    const AxisModels m = load_axis_models(lat_file, lon_file);
    const Index need = std::max(m.lat.spec.input_horizon,
                                m.lon.spec.input_horizon);
    if (t_depart < need || t_depart > track.size())
      throw std::invalid_argument(
          "departure time needs " + std::to_string(need) +
          " s of recorded history before it");
    bird.lat = forecast::model_forecast(
        m.lat,
        track.lat.segment(t_depart - m.lat.spec.input_horizon,
                          m.lat.spec.input_horizon),
        horizon);
    bird.lon = forecast::model_forecast(
        m.lon,
        track.lon.segment(t_depart - m.lon.spec.input_horizon,
                          m.lon.spec.input_horizon),
        horizon);
  }

  const deconflict::ConflictReport report = deconflict::min_delay(
      cfg.runway, bird, cfg.eps_lat_m, cfg.eps_lon_m, cfg.max_delay_s,
      track.t(0) + static_cast<double>(t_depart),
      euclidean ? deconflict::DetectMode::Euclidean
                : deconflict::DetectMode::Box);

  json j;
  j["min_delay_s"] = report.min_delay_s;
  j["undelayed_conflict"] =
      report.conflict ? event_to_json(*report.conflict) : json(nullptr);
  j["t_depart_s"] = track.t(0) + static_cast<double>(t_depart);
  {
    std::ofstream out = open_out(fs::path(out_dir) / "conflict_report.json");
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out = open_out(fs::path(out_dir) / "separations.csv");
    out << "t_s,sep_lat_m,sep_lon_m,aircraft_lat,aircraft_lon,bird_lat,"
           "bird_lon\n";
    for (const auto& s : report.trace)
      out << fmt_double(s.t) << "," << fmt_double(s.sep_lat_m) << ","
          << fmt_double(s.sep_lon_m) << "," << fmt_double(s.aircraft_lat)
          << "," << fmt_double(s.aircraft_lon) << ","
          << fmt_double(s.bird_lat) << "," << fmt_double(s.bird_lon) << "\n";
  }
  if (report.conflict)
    std::cout << "conflict without delay at t=" << report.conflict->t
              << " (sep " << report.conflict->sep_lat_m << " m lat, "
              << report.conflict->sep_lon_m << " m lon)\n";
  else
    std::cout << "no conflict without delay\n";
  std::cout << "minimum safe departure delay: " << report.min_delay_s
            << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bird-trajectory forecasting and departure deconfliction"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  Index epochs_override = 0;
  std::string model_override, axis_override;
  bool has_seed = false, has_epochs = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration JSON");
    sub->add_option("--seed", seed_override, "override config seed")
        ->each([&has_seed](const std::string&) { has_seed = true; });
    sub->add_option("--epochs", epochs_override, "override config epochs")
        ->each([&has_epochs](const std::string&) { has_epochs = true; });
    sub->add_option("--model", model_override,
                    "override model kind: vanilla|stacked|bidirectional|encdec");
    sub->add_option("--axis", axis_override, "override axis: lat|lon");
  };
  auto make_config = [&]() {
    RunConfig cfg =
        config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (has_seed) cfg.seed = seed_override;
    if (has_epochs) cfg.epochs = epochs_override;
    if (!model_override.empty()) cfg.model = model_override;
    if (!axis_override.empty()) cfg.axis = axis_override;
    return cfg;
  };

  // ingest
  std::string in_csv, out_file;
  CLI::App* ingest = app.add_subcommand(
      "ingest", "normalize a raw track CSV (parse, sort out gaps, rebase)");
  ingest->add_option("csv", in_csv, "raw input CSV")->required();
  ingest->add_option("out", out_file, "normalized output CSV")->required();

  // train
  CLI::App* train = app.add_subcommand("train", "train one model on one axis");
  add_common(train);

  // evaluate
  std::string model_file;
  bool oracle = false;
  Index partition_ix = 0;
  bool has_partition = false;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score a model (or the truth oracle) on the test partitions");
  add_common(evaluate);
  evaluate->add_option("--model-file", model_file, "trained model JSON");
  evaluate->add_flag("--oracle", oracle,
                     "score a perfect predictor instead of a model");
  evaluate->add_option("--partition", partition_ix, "single partition (1-based)")
      ->each([&has_partition](const std::string&) { has_partition = true; });

  // forecast
  std::string track_path, lat_file, lon_file, out_path = "forecast.csv";
  Index t_start = 300, horizon = 30;
  CLI::App* fc = app.add_subcommand("forecast",
                                    "forecast both axes from a track position");
  fc->add_option("--track", track_path, "track CSV")->required();
  fc->add_option("--model-lat", lat_file, "latitude model JSON");
  fc->add_option("--model-lon", lon_file, "longitude model JSON");
  fc->add_flag("--oracle", oracle, "replay recorded truth as the forecast");
  fc->add_option("--t-start", t_start, "index of the first predicted sample");
  fc->add_option("--horizon", horizon, "number of steps to predict");
  fc->add_option("--out", out_path, "output CSV path");

  // simulate
  std::string runway_path, sim_out = "out";
  Index t_depart = 0;
  bool has_depart = false;
  CLI::App* sim = app.add_subcommand(
      "simulate", "forecast the bird and find the minimal safe departure delay");
  sim->add_option("--track", track_path, "track CSV")->required();
  sim->add_option("--runway", runway_path, "runway config JSON")->required();
  sim->add_option("--model-lat", lat_file, "latitude model JSON");
  sim->add_option("--model-lon", lon_file, "longitude model JSON");
  sim->add_flag("--oracle", oracle, "replay recorded truth as the forecast");
  sim->add_option("--t-depart", t_depart, "departure index into the track")
      ->each([&has_depart](const std::string&) { has_depart = true; });
  sim->add_option("--out", sim_out, "output directory");
  bool euclidean = false;
  sim->add_flag("--euclidean", euclidean,
                "elliptical separation threshold instead of the per-axis box");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(in_csv, out_file);
    if (train->parsed()) return cmd_train(make_config());
    if (evaluate->parsed())
      return cmd_evaluate(make_config(), model_file, oracle,
                          has_partition ? std::optional<Index>(partition_ix)
                                        : std::nullopt);
    if (fc->parsed())
      return cmd_forecast(track_path, lat_file, lon_file, oracle, t_start,
                          horizon, out_path);
    if (sim->parsed())
      return cmd_simulate(track_path, runway_path, lat_file, lon_file, oracle,
                          has_depart ? std::optional<Index>(t_depart)
                                     : std::nullopt,
                          sim_out, euclidean);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
