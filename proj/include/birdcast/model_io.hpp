#ifndef BIRDCAST_MODEL_IO_HPP
#define BIRDCAST_MODEL_IO_HPP

#include "birdcast/nn.hpp"

#include <string>

namespace birdcast::model_io {

inline constexpr int kFormatVersion = 1;

// Versioned JSON: model spec, axis, scaler, training history and one
// flattened column-major array per named weight, each with its shape.
// Numbers round-trip bit-exact, so a load reproduces forward outputs
// exactly.
std::string to_json_string(const nn::TrainedModel& model);
nn::TrainedModel from_json_string(const std::string& text);

void save_model(const nn::TrainedModel& model, const std::string& path);
nn::TrainedModel load_model(const std::string& path);

}  // namespace birdcast::model_io

#endif  // BIRDCAST_MODEL_IO_HPP
