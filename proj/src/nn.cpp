#include "birdcast/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace birdcast::nn {

ModelKind kind_from_string(const std::string& name) {
  if (name == "vanilla") return ModelKind::Vanilla;
  if (name == "stacked") return ModelKind::Stacked;
  if (name == "bidirectional") return ModelKind::Bidirectional;
  if (name == "encdec" || name == "encoder_decoder")
    return ModelKind::EncoderDecoder;
  throw std::invalid_argument("unknown model kind: " + name);
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Vanilla: return "vanilla";
    case ModelKind::Stacked: return "stacked";
    case ModelKind::Bidirectional: return "bidirectional";
    case ModelKind::EncoderDecoder: return "encoder_decoder";
  }
  throw std::logic_error("bad ModelKind");
}

void ModelSpec::validate() const {
  if (input_horizon < 1)
    throw std::invalid_argument("input_horizon must be >= 1");
  if (prediction_horizon < 1)
    throw std::invalid_argument("prediction_horizon must be >= 1");
  for (Index u : layer_units)
    if (u < 1) throw std::invalid_argument("layer units must be >= 1");
  switch (kind) {
    case ModelKind::Vanilla:
      if (layer_units.size() != 1)
        throw std::invalid_argument("vanilla model takes exactly one layer size");
      break;
    case ModelKind::Stacked:
      if (layer_units.size() < 2)
        throw std::invalid_argument("stacked model needs at least two layers");
      break;
    case ModelKind::Bidirectional:
      if (layer_units.size() != 1)
        throw std::invalid_argument(
            "bidirectional model takes one per-direction layer size");
      break;
    case ModelKind::EncoderDecoder:
      if (layer_units.size() != 2)
        throw std::invalid_argument(
            "encoder_decoder model takes [encoder_units, decoder_units]");
      break;
  }
  if (kind != ModelKind::EncoderDecoder && prediction_horizon != 1)
    throw std::invalid_argument(
        "prediction_horizon must be 1 for many-to-one models");
}

// ---------------------------------------------------------------------------
// Parameter plumbing
// ---------------------------------------------------------------------------

std::vector<ParamRef> enumerate_params(ModelWeights& w) {
  std::vector<ParamRef> refs;
  for (std::size_t k = 0; k < w.cells.size(); ++k) {
    LstmParams& c = w.cells[k];
    const std::string base = "cell" + std::to_string(k) + ".";
    refs.push_back({base + "w_in", c.w_in.data(), c.w_in.size()});
    refs.push_back({base + "w_rec", c.w_rec.data(), c.w_rec.size()});
    refs.push_back({base + "bias", c.bias.data(), c.bias.size()});
  }
  if (w.bridge) {
    refs.push_back({"bridge.w", w.bridge->w.data(), w.bridge->w.size()});
    refs.push_back({"bridge.b", w.bridge->b.data(), w.bridge->b.size()});
  }
  refs.push_back({"head.w", w.head.w.data(), w.head.w.size()});
  refs.push_back({"head.b", w.head.b.data(), w.head.b.size()});
  return refs;
}

ModelWeights zeros_like(const ModelWeights& w) {
  ModelWeights z;
  z.cells.reserve(w.cells.size());
  for (const LstmParams& c : w.cells) {
    LstmParams zc;
    zc.w_in = Matrix::Zero(c.w_in.rows(), c.w_in.cols());
    zc.w_rec = Matrix::Zero(c.w_rec.rows(), c.w_rec.cols());
    zc.bias = Vector::Zero(c.bias.size());
    zc.cell_activation = c.cell_activation;
    z.cells.push_back(std::move(zc));
  }
  if (w.bridge) {
    z.bridge = DenseParams{Matrix::Zero(w.bridge->w.rows(), w.bridge->w.cols()),
                           Vector::Zero(w.bridge->b.size())};
  }
  z.head.w = Matrix::Zero(w.head.w.rows(), w.head.w.cols());
  z.head.b = Vector::Zero(w.head.b.size());
  return z;
}

Index param_count(const ModelWeights& w) {
  Index n = 0;
  for (const LstmParams& c : w.cells)
    n += c.w_in.size() + c.w_rec.size() + c.bias.size();
  if (w.bridge) n += w.bridge->w.size() + w.bridge->b.size();
  return n + w.head.w.size() + w.head.b.size();
}

namespace {

Matrix glorot(Index rows, Index cols, num::Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

// Each gate's input and recurrent blocks are drawn as separate Glorot
// matrices, in gate order, so the fused layout does not change the stream.
LstmParams init_cell(Index units, Index input_dim, num::Activation act,
                     num::Rng& rng) {
  LstmParams p;
  p.w_in.resize(4 * units, input_dim);
  p.w_rec.resize(4 * units, units);
  p.bias = Vector::Zero(4 * units);
  p.cell_activation = act;
  for (Index gate = 0; gate < 4; ++gate) {
    p.w_in.middleRows(gate * units, units) = glorot(units, input_dim, rng);
    p.w_rec.middleRows(gate * units, units) = glorot(units, units, rng);
  }
  p.bias.head(units).setOnes();  // forget gate opens fully at the start
  return p;
}

DenseParams init_dense(Index rows, Index cols, num::Rng& rng) {
  return DenseParams{glorot(rows, cols, rng), Vector::Zero(rows)};
}

}  // namespace

ModelWeights init_weights(const ModelSpec& spec, num::Rng& rng) {
  spec.validate();
  ModelWeights w;
  const num::Activation act = spec.cell_activation;
  switch (spec.kind) {
    case ModelKind::Vanilla:
    case ModelKind::Stacked: {
      Index in = 1;
      for (Index u : spec.layer_units) {
        w.cells.push_back(init_cell(u, in, act, rng));
        in = u;
      }
      w.head = init_dense(1, in, rng);
      break;
    }
    case ModelKind::Bidirectional: {
      const Index u = spec.layer_units[0];
      w.cells.push_back(init_cell(u, 1, act, rng));  // forward direction
      w.cells.push_back(init_cell(u, 1, act, rng));  // backward direction
      w.head = init_dense(1, 2 * u, rng);
      break;
    }
    case ModelKind::EncoderDecoder: {
      const Index ue = spec.layer_units[0];
      const Index ud = spec.layer_units[1];
      w.cells.push_back(init_cell(ue, 1, act, rng));
      w.cells.push_back(init_cell(ud, ud, act, rng));
      w.bridge = init_dense(ud, ue, rng);
      w.head = init_dense(1, ud, rng);
      break;
    }
  }
  return w;
}

namespace {

void require_cell_shape(const LstmParams& c, Index units, Index input_dim,
                        const std::string& which) {
  if (c.w_rec.rows() != 4 * units || c.w_rec.cols() != units ||
      c.w_in.rows() != 4 * units || c.w_in.cols() != input_dim ||
      c.bias.size() != 4 * units)
    throw std::invalid_argument("weight shapes for " + which +
                                " do not match the model spec");
}

}  // namespace

void validate_weights(const ModelSpec& spec, const ModelWeights& w) {
  spec.validate();
  const bool encdec = spec.kind == ModelKind::EncoderDecoder;
  std::size_t expect_cells = 0;
  switch (spec.kind) {
    case ModelKind::Vanilla: expect_cells = 1; break;
    case ModelKind::Stacked: expect_cells = spec.layer_units.size(); break;
    case ModelKind::Bidirectional: expect_cells = 2; break;
    case ModelKind::EncoderDecoder: expect_cells = 2; break;
  }
  if (w.cells.size() != expect_cells)
    throw std::invalid_argument("model has wrong number of recurrent cells");
  if (encdec != w.bridge.has_value())
    throw std::invalid_argument(encdec ? "missing bridge projection"
                                       : "unexpected bridge projection");

  Index head_in = 0;
  switch (spec.kind) {
    case ModelKind::Vanilla:
    case ModelKind::Stacked: {
      Index in = 1;
      for (std::size_t k = 0; k < spec.layer_units.size(); ++k) {
        require_cell_shape(w.cells[k], spec.layer_units[k], in,
                           "layer " + std::to_string(k));
        in = spec.layer_units[k];
      }
      head_in = in;
      break;
    }
    case ModelKind::Bidirectional: {
      const Index u = spec.layer_units[0];
      require_cell_shape(w.cells[0], u, 1, "forward cell");
      require_cell_shape(w.cells[1], u, 1, "backward cell");
      head_in = 2 * u;
      break;
    }
    case ModelKind::EncoderDecoder: {
      const Index ue = spec.layer_units[0];
      const Index ud = spec.layer_units[1];
      require_cell_shape(w.cells[0], ue, 1, "encoder");
      require_cell_shape(w.cells[1], ud, ud, "decoder");
      if (w.bridge->w.rows() != ud || w.bridge->w.cols() != ue ||
          w.bridge->b.size() != ud)
        throw std::invalid_argument("bridge projection has wrong shape");
      head_in = ud;
      break;
    }
  }
  if (w.head.w.rows() != 1 || w.head.w.cols() != head_in ||
      w.head.b.size() != 1)
    throw std::invalid_argument("output head has wrong shape");
  for (const LstmParams& c : w.cells)
    if (c.cell_activation != spec.cell_activation)
      throw std::invalid_argument("cell activation does not match the spec");
}

// ---------------------------------------------------------------------------
// Single-vector cell step (reference path; the batched engine repeats the
// same arithmetic on matrices)
// ---------------------------------------------------------------------------

CellState lstm_cell_step(const Vector& x, const Vector& h_prev,
                         const Vector& c_prev, const LstmParams& p) {
  const Index u = p.units();
  if (x.size() != p.input_dim())
    throw std::invalid_argument("cell input has wrong size");
  if (h_prev.size() != u || c_prev.size() != u)
    throw std::invalid_argument("cell state has wrong size");
  Vector z = p.w_in * x + p.w_rec * h_prev + p.bias;
  Vector f = z.head(u).unaryExpr([](double v) { return num::sigmoid(v); });
  Vector i =
      z.segment(u, u).unaryExpr([](double v) { return num::sigmoid(v); });
  Vector g = z.segment(2 * u, u).unaryExpr([&p](double v) {
    return num::apply_activation(p.cell_activation, v);
  });
  Vector o = z.tail(u).unaryExpr([](double v) { return num::sigmoid(v); });
  CellState s;
  s.c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  s.h = o.cwiseProduct(s.c.unaryExpr([&p](double v) {
    return num::apply_activation(p.cell_activation, v);
  }));
  return s;
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

LossKind loss_from_string(const std::string& name) {
  if (name == "mse") return LossKind::Mse;
  if (name == "mae") return LossKind::Mae;
  throw std::invalid_argument("unknown loss: " + name);
}

std::string to_string(LossKind k) {
  return k == LossKind::Mse ? "mse" : "mae";
}

double loss_value(const Matrix& pred, const Matrix& target, LossKind kind) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("prediction and target shapes differ: " +
                                num::shape_of(pred) + " vs " +
                                num::shape_of(target));
  if (pred.size() == 0) throw std::invalid_argument("empty loss input");
  const auto d = (pred - target).array();
  return kind == LossKind::Mse ? d.square().mean() : d.abs().mean();
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

AdamState make_adam_state(const ModelWeights& w, double lr) {
  AdamState s;
  s.m = zeros_like(w);
  s.v = zeros_like(w);
  s.lr = lr;
  return s;
}

void adam_step(ModelWeights& w, ModelWeights& grads, AdamState& state) {
  ++state.step_count;
  const double bc1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  auto pw = enumerate_params(w);
  auto pg = enumerate_params(grads);
  auto pm = enumerate_params(state.m);
  auto pv = enumerate_params(state.v);
  for (std::size_t k = 0; k < pw.size(); ++k) {
    Eigen::Map<Eigen::ArrayXd> wa(pw[k].data, pw[k].size);
    Eigen::Map<const Eigen::ArrayXd> ga(pg[k].data, pg[k].size);
    Eigen::Map<Eigen::ArrayXd> ma(pm[k].data, pm[k].size);
    Eigen::Map<Eigen::ArrayXd> va(pv[k].data, pv[k].size);
    ma = state.beta1 * ma + (1.0 - state.beta1) * ga;
    va = state.beta2 * va + (1.0 - state.beta2) * ga.square();
    wa -= state.lr * (ma / bc1) / ((va / bc2).sqrt() + state.eps);
  }
}

double clip_global_norm(ModelWeights& grads, double max_norm) {
  auto refs = enumerate_params(grads);
  double sq = 0.0;
  for (const ParamRef& r : refs) {
    Eigen::Map<const Eigen::ArrayXd> a(r.data, r.size);
    sq += a.square().sum();
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (const ParamRef& r : refs) {
      Eigen::Map<Eigen::ArrayXd> a(r.data, r.size);
      a *= scale;
    }
  }
  return norm;
}

}  // namespace birdcast::nn
