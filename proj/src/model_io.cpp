#include "birdcast/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace birdcast::model_io {

using nlohmann::json;

namespace {

json spec_to_json(const nn::ModelSpec& spec) {
  json j;
  j["kind"] = nn::to_string(spec.kind);
  j["layer_units"] = spec.layer_units;
  j["input_horizon"] = spec.input_horizon;
  j["prediction_horizon"] = spec.prediction_horizon;
  j["cell_activation"] = num::to_string(spec.cell_activation);
  j["seed"] = spec.seed;
  return j;
}

nn::ModelSpec spec_from_json(const json& j) {
  nn::ModelSpec spec;
  spec.kind = nn::kind_from_string(j.at("kind").get<std::string>());
  spec.layer_units = j.at("layer_units").get<std::vector<Index>>();
  spec.input_horizon = j.at("input_horizon").get<Index>();
  spec.prediction_horizon = j.at("prediction_horizon").get<Index>();
  spec.cell_activation =
      num::activation_from_string(j.at("cell_activation").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

json weights_to_json(nn::ModelWeights& w) {
  json arrays = json::array();
  for (const nn::ParamRef& r : nn::enumerate_params(w)) {
    json entry;
    entry["name"] = r.name;
    std::vector<double> flat(r.data, r.data + r.size);
    for (double v : flat)
      if (!std::isfinite(v))
        throw std::runtime_error("refusing to save non-finite weight in " +
                                 r.name);
    entry["data"] = std::move(flat);
    arrays.push_back(std::move(entry));
  }
  return arrays;
}

json shapes_to_json(nn::ModelWeights& w) {
  // Redundant with the spec but makes files self-describing; checked on load.
  json shapes = json::object();
  for (std::size_t k = 0; k < w.cells.size(); ++k) {
    const nn::LstmParams& c = w.cells[k];
    const std::string base = "cell" + std::to_string(k) + ".";
    shapes[base + "w_in"] = {c.w_in.rows(), c.w_in.cols()};
    shapes[base + "w_rec"] = {c.w_rec.rows(), c.w_rec.cols()};
    shapes[base + "bias"] = {c.bias.size(), Index{1}};
  }
  if (w.bridge) {
    shapes["bridge.w"] = {w.bridge->w.rows(), w.bridge->w.cols()};
    shapes["bridge.b"] = {w.bridge->b.size(), Index{1}};
  }
  shapes["head.w"] = {w.head.w.rows(), w.head.w.cols()};
  shapes["head.b"] = {w.head.b.size(), Index{1}};
  return shapes;
}

}  // namespace

std::string to_json_string(const nn::TrainedModel& model) {
  nn::validate_weights(model.spec, model.weights);
  json j;
  j["format_version"] = kFormatVersion;
  j["model"] = spec_to_json(model.spec);
  j["axis"] = geo::to_string(model.axis);
  j["scaler"] = {{"min", model.scaler.min}, {"max", model.scaler.max}};
  j["best_epoch"] = model.best_epoch;
  json hist = json::array();
  for (const nn::EpochStats& e : model.history)
    hist.push_back({{"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  j["history"] = std::move(hist);
  nn::ModelWeights copy = model.weights;  // enumerate needs mutable access
  j["shapes"] = shapes_to_json(copy);
  j["weights"] = weights_to_json(copy);
  return j.dump(2) + "\n";
}

nn::TrainedModel from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model file is not valid JSON: ") +
                             e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw std::runtime_error("unsupported model format_version " +
                               std::to_string(version) + " (expected " +
                               std::to_string(kFormatVersion) + ")");

    nn::TrainedModel model;
    model.spec = spec_from_json(j.at("model"));
    model.axis = geo::axis_from_string(j.at("axis").get<std::string>());
    model.scaler.min = j.at("scaler").at("min").get<double>();
    model.scaler.max = j.at("scaler").at("max").get<double>();
    model.best_epoch = j.at("best_epoch").get<Index>();
    for (const json& e : j.at("history"))
      model.history.push_back({e.at("train_loss").get<double>(),
                               e.at("val_loss").get<double>()});

    // Allocate the shapes the spec implies, then fill from the arrays.
    num::Rng throwaway(0);
    model.weights = nn::init_weights(model.spec, throwaway);
    auto refs = nn::enumerate_params(model.weights);
    const json& arrays = j.at("weights");
    if (arrays.size() != refs.size())
      throw std::runtime_error("model file has " +
                               std::to_string(arrays.size()) +
                               " weight arrays, expected " +
                               std::to_string(refs.size()));
    const json& shapes = j.at("shapes");
    for (std::size_t k = 0; k < refs.size(); ++k) {
      const json& entry = arrays[k];
      if (entry.at("name").get<std::string>() != refs[k].name)
        throw std::runtime_error("unexpected weight array order: found " +
                                 entry.at("name").get<std::string>() +
                                 ", expected " + refs[k].name);
      const auto flat = entry.at("data").get<std::vector<double>>();
      if (static_cast<Index>(flat.size()) != refs[k].size)
        throw std::runtime_error("weight array " + refs[k].name + " has " +
                                 std::to_string(flat.size()) +
                                 " values, expected " +
                                 std::to_string(refs[k].size));
      const auto shape = shapes.at(refs[k].name).get<std::array<Index, 2>>();
      if (shape[0] * shape[1] != refs[k].size)
        throw std::runtime_error("shape manifest for " + refs[k].name +
                                 " does not match its data length");
      std::copy(flat.begin(), flat.end(), refs[k].data);
    }
    nn::validate_weights(model.spec, model.weights);
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const nn::TrainedModel& model, const std::string& path) {
  const std::string text = to_json_string(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out.good()) throw std::runtime_error("failed writing model: " + path);
}

nn::TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

}  // namespace birdcast::model_io
