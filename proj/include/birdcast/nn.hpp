#ifndef BIRDCAST_NN_HPP
#define BIRDCAST_NN_HPP

#include "birdcast/data.hpp"
#include "birdcast/geo.hpp"
#include "birdcast/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace birdcast::nn {

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

enum class ModelKind { Vanilla, Stacked, Bidirectional, EncoderDecoder };

ModelKind kind_from_string(const std::string& name);
std::string to_string(ModelKind k);

struct ModelSpec {
  ModelKind kind = ModelKind::Vanilla;
  std::vector<Index> layer_units;
  Index input_horizon = 300;
  Index prediction_horizon = 1;
  num::Activation cell_activation = num::Activation::Relu;
  std::uint64_t seed = 42;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Parameters. Gate blocks are fused along rows in the order
// [forget; input; candidate; output] so one GEMM per step covers all gates.
// ---------------------------------------------------------------------------

struct LstmParams {
  Matrix w_in;   // 4u x input_dim
  Matrix w_rec;  // 4u x u
  Vector bias;   // 4u
  num::Activation cell_activation = num::Activation::Tanh;

  Index units() const { return w_rec.cols(); }
  Index input_dim() const { return w_in.cols(); }

  // Per-gate views into the fused storage.
  auto forget_w() const { return w_in.topRows(units()); }
  auto input_w() const { return w_in.middleRows(units(), units()); }
  auto candidate_w() const { return w_in.middleRows(2 * units(), units()); }
  auto output_w() const { return w_in.bottomRows(units()); }
  auto forget_u() const { return w_rec.topRows(units()); }
  auto input_u() const { return w_rec.middleRows(units(), units()); }
  auto candidate_u() const { return w_rec.middleRows(2 * units(), units()); }
  auto output_u() const { return w_rec.bottomRows(units()); }
  auto forget_b() const { return bias.head(units()); }
  auto input_b() const { return bias.segment(units(), units()); }
  auto candidate_b() const { return bias.segment(2 * units(), units()); }
  auto output_b() const { return bias.tail(units()); }
};

struct DenseParams {
  Matrix w;
  Vector b;
};

// Weight container shared by all four architectures:
//   vanilla        cells = {layer}
//   stacked        cells = {layer0, layer1, ...}
//   bidirectional  cells = {forward, backward}
//   encoder_decoder cells = {encoder, decoder}, bridge projects the encoder's
//                   final hidden state to the decoder input width
struct ModelWeights {
  std::vector<LstmParams> cells;
  std::optional<DenseParams> bridge;
  DenseParams head;
};

// Flat view over every trainable array, in a fixed order. Optimizer state,
// gradient clipping, serialization and the finite-difference checks all walk
// the same enumeration.
struct ParamRef {
  std::string name;
  double* data;
  Index size;
};
std::vector<ParamRef> enumerate_params(ModelWeights& w);

ModelWeights zeros_like(const ModelWeights& w);
Index param_count(const ModelWeights& w);

// Glorot-uniform input/recurrent weights, zero biases except the forget-gate
// bias at 1.0 (keeps gradients alive over the 300-step unroll).
ModelWeights init_weights(const ModelSpec& spec, num::Rng& rng);

// Throws if the weight shapes do not realize the spec.
void validate_weights(const ModelSpec& spec, const ModelWeights& w);

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

struct CellState {
  Vector h;
  Vector c;
};

// Single LSTM step:
//   f = sig(Wf x + Uf h + bf)       i = sig(Wi x + Ui h + bi)
//   g = act(Wc x + Uc h + bc)       o = sig(Wo x + Uo h + bo)
//   c' = f.c + i.g                  h' = o.act(c')
CellState lstm_cell_step(const Vector& x, const Vector& h_prev,
                         const Vector& c_prev, const LstmParams& p);

// Batched model forward; `windows` holds one input window per column.
// Returns prediction_horizon x batch (one row for many-to-one models).
Matrix forward_batch(const ModelSpec& spec, const ModelWeights& w,
                     const Matrix& windows);

// Convenience single-window forward.
Vector forward_one(const ModelSpec& spec, const ModelWeights& w,
                   const Vector& window);

// ---------------------------------------------------------------------------
// Loss and gradients
// ---------------------------------------------------------------------------

enum class LossKind { Mse, Mae };

LossKind loss_from_string(const std::string& name);
std::string to_string(LossKind k);

double loss_value(const Matrix& pred, const Matrix& target, LossKind kind);

// Exact gradient of the batch-mean loss with respect to every weight, fully
// unrolled over all time steps. Returns the batch loss.
double loss_and_gradients(const ModelSpec& spec, const ModelWeights& w,
                          const Matrix& inputs, const Matrix& targets,
                          LossKind kind, ModelWeights& grads);

ModelWeights bptt_gradients(const ModelSpec& spec, const ModelWeights& w,
                            const Matrix& inputs, const Matrix& targets,
                            LossKind kind);

double batch_loss(const ModelSpec& spec, const ModelWeights& w,
                  const Matrix& inputs, const Matrix& targets, LossKind kind);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
  ModelWeights m;
  ModelWeights v;
  std::int64_t step_count = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const ModelWeights& w, double lr);
void adam_step(ModelWeights& w, ModelWeights& grads, AdamState& state);

// Scales gradients so their global L2 norm does not exceed max_norm.
// Returns the pre-clip norm.
double clip_global_norm(ModelWeights& grads, double max_norm);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainOptions {
  Index epochs = 100;
  Index batch_size = 32;
  double learning_rate = 0.001;
  LossKind loss = LossKind::Mse;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainedModel {
  ModelSpec spec;
  ModelWeights weights;  // snapshot from best_epoch, not the final epoch
  data::Scaler scaler;
  geo::Axis axis = geo::Axis::Lat;
  std::vector<EpochStats> history;
  Index best_epoch = 0;
};

// Per-epoch: seeded shuffle, batches of <= batch_size, BPTT + Adam, then a
// full validation pass. Keeps the weights from the epoch with the lowest
// validation loss.
TrainedModel train(const ModelSpec& spec, const data::WindowedDataset& train_ds,
                   const data::WindowedDataset& val_ds,
                   const TrainOptions& opts, num::Rng& rng);

// Mean loss of the model over a whole dataset, evaluated in fixed-size
// batches (deterministic; used for the validation pass).
double dataset_loss(const ModelSpec& spec, const ModelWeights& w,
                    const data::WindowedDataset& ds, Index batch_size,
                    LossKind kind);

}  // namespace birdcast::nn

#endif  // BIRDCAST_NN_HPP
