#include "birdcast/nn.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

// Batched forward and exact backpropagation through time. Sequences are kept
// as one units x batch matrix per step; each step costs two GEMMs forward and
// four backward, which is where essentially all of the training time goes.

namespace birdcast::nn {
namespace {

using Seq = std::vector<Matrix>;

Matrix act_derivative(num::Activation a, const Matrix& value) {
  return value.unaryExpr([a](double v) {
    return num::activation_derivative_from_value(a, v);
  });
}

struct LayerCache {
  Seq f, i, g, o, c, a;  // gate and state values per step (training only)
  Seq h;                 // hidden sequence, always kept
};

// Runs one LSTM layer over a per-step input sequence. Initial state is zero.
LayerCache layer_forward(const LstmParams& p, const Seq& xs, bool keep_gates) {
  const Index u = p.units();
  const Index steps = static_cast<Index>(xs.size());
  const Index batch = xs[0].cols();
  LayerCache cc;
  cc.h.resize(steps);
  if (keep_gates) {
    cc.f.resize(steps);
    cc.i.resize(steps);
    cc.g.resize(steps);
    cc.o.resize(steps);
    cc.c.resize(steps);
    cc.a.resize(steps);
  }
  Matrix h_prev = Matrix::Zero(u, batch);
  Matrix c_prev = Matrix::Zero(u, batch);
  Matrix z(4 * u, batch);
  for (Index t = 0; t < steps; ++t) {
    z.noalias() = p.w_in * xs[t];
    z.noalias() += p.w_rec * h_prev;
    z.colwise() += p.bias;
    Matrix f = z.topRows(u);
    num::sigmoid_inplace(f);
    Matrix i = z.middleRows(u, u);
    num::sigmoid_inplace(i);
    Matrix g = z.middleRows(2 * u, u);
    num::activation_inplace(p.cell_activation, g);
    Matrix o = z.bottomRows(u);
    num::sigmoid_inplace(o);
    Matrix c = (f.array() * c_prev.array() + i.array() * g.array()).matrix();
    Matrix a = c;
    num::activation_inplace(p.cell_activation, a);
    cc.h[t] = (o.array() * a.array()).matrix();
    h_prev = cc.h[t];
    c_prev = c;
    if (keep_gates) {
      cc.f[t] = std::move(f);
      cc.i[t] = std::move(i);
      cc.g[t] = std::move(g);
      cc.o[t] = std::move(o);
      cc.c[t] = std::move(c);
      cc.a[t] = std::move(a);
    }
  }
  return cc;
}

struct LayerGrads {
  Matrix dw_in, dw_rec;
  Vector db;
  Seq dx;  // gradient wrt the layer's inputs, filled only on request
};

// dh_ext[t] is the external gradient arriving at h[t] (empty matrix = zero).
LayerGrads layer_backward(const LstmParams& p, const Seq& xs,
                          const LayerCache& cc, const Seq& dh_ext,
                          bool need_dx) {
  const Index u = p.units();
  const Index steps = static_cast<Index>(xs.size());
  const Index batch = xs[0].cols();
  const num::Activation act = p.cell_activation;

  LayerGrads gr;
  gr.dw_in = Matrix::Zero(p.w_in.rows(), p.w_in.cols());
  gr.dw_rec = Matrix::Zero(p.w_rec.rows(), p.w_rec.cols());
  gr.db = Vector::Zero(p.bias.size());
  if (need_dx) gr.dx.resize(steps);

  const Matrix zero_state = Matrix::Zero(u, batch);
  Matrix dh_rec = Matrix::Zero(u, batch);  // recurrent h-path from step t+1
  Matrix dc = Matrix::Zero(u, batch);      // cell-path gradient entering t
  Matrix dz(4 * u, batch);
  for (Index t = steps - 1; t >= 0; --t) {
    Matrix dh = dh_rec;
    if (dh_ext[t].size() != 0) dh += dh_ext[t];

    // h = o . act(c)
    const Matrix da_dc = act_derivative(act, cc.a[t]);
    dz.bottomRows(u) = (dh.array() * cc.a[t].array() * cc.o[t].array() *
                        (1.0 - cc.o[t].array()))
                           .matrix();
    dc.array() += dh.array() * cc.o[t].array() * da_dc.array();

    // c = f . c_prev + i . g
    const Matrix& c_prev = t > 0 ? cc.c[t - 1] : zero_state;
    dz.topRows(u) = (dc.array() * c_prev.array() * cc.f[t].array() *
                     (1.0 - cc.f[t].array()))
                        .matrix();
    dz.middleRows(u, u) = (dc.array() * cc.g[t].array() * cc.i[t].array() *
                           (1.0 - cc.i[t].array()))
                              .matrix();
    dz.middleRows(2 * u, u) =
        (dc.array() * cc.i[t].array() *
         act_derivative(act, cc.g[t]).array())
            .matrix();
    dc = (dc.array() * cc.f[t].array()).matrix();  // flows to step t-1

    const Matrix& h_prev = t > 0 ? cc.h[t - 1] : zero_state;
    gr.dw_in.noalias() += dz * xs[t].transpose();
    gr.dw_rec.noalias() += dz * h_prev.transpose();
    gr.db += dz.rowwise().sum();
    dh_rec.noalias() = p.w_rec.transpose() * dz;
    if (need_dx) gr.dx[t].noalias() = p.w_in.transpose() * dz;
  }
  return gr;
}

Seq rows_as_steps(const Matrix& windows) {
  Seq xs(static_cast<std::size_t>(windows.rows()));
  for (Index t = 0; t < windows.rows(); ++t) xs[t] = windows.row(t);
  return xs;
}

Seq reversed(const Seq& xs) {
  return Seq(xs.rbegin(), xs.rend());
}

struct ModelCache {
  std::vector<Seq> inputs;        // per cell, what it consumed
  std::vector<LayerCache> layers;  // aligned with weights.cells
  Matrix pred;                     // prediction_horizon x batch
};

ModelCache model_forward(const ModelSpec& spec, const ModelWeights& w,
                         const Matrix& windows, bool keep_gates) {
  if (windows.rows() != spec.input_horizon)
    throw std::invalid_argument("window length " +
                                std::to_string(windows.rows()) +
                                " does not match input_horizon " +
                                std::to_string(spec.input_horizon));
  if (windows.cols() < 1) throw std::invalid_argument("empty batch");

  const Index batch = windows.cols();
  ModelCache mc;
  switch (spec.kind) {
    case ModelKind::Vanilla:
    case ModelKind::Stacked: {
      mc.inputs.push_back(rows_as_steps(windows));
      for (std::size_t k = 0; k < w.cells.size(); ++k) {
        mc.layers.push_back(
            layer_forward(w.cells[k], mc.inputs[k], keep_gates));
        if (k + 1 < w.cells.size()) mc.inputs.push_back(mc.layers[k].h);
      }
      const Matrix& h_final = mc.layers.back().h.back();
      mc.pred = w.head.w * h_final;
      mc.pred.colwise() += w.head.b;
      break;
    }
    case ModelKind::Bidirectional: {
      mc.inputs.push_back(rows_as_steps(windows));
      mc.inputs.push_back(reversed(mc.inputs[0]));
      mc.layers.push_back(layer_forward(w.cells[0], mc.inputs[0], keep_gates));
      mc.layers.push_back(layer_forward(w.cells[1], mc.inputs[1], keep_gates));
      const Index u = w.cells[0].units();
      Matrix joined(2 * u, batch);
      joined.topRows(u) = mc.layers[0].h.back();
      joined.bottomRows(u) = mc.layers[1].h.back();
      mc.pred = w.head.w * joined;
      mc.pred.colwise() += w.head.b;
      break;
    }
    case ModelKind::EncoderDecoder: {
      mc.inputs.push_back(rows_as_steps(windows));
      mc.layers.push_back(layer_forward(w.cells[0], mc.inputs[0], keep_gates));
      Matrix context = w.bridge->w * mc.layers[0].h.back();
      context.colwise() += w.bridge->b;
      mc.inputs.push_back(
          Seq(static_cast<std::size_t>(spec.prediction_horizon), context));
      mc.layers.push_back(layer_forward(w.cells[1], mc.inputs[1], keep_gates));
      mc.pred.resize(spec.prediction_horizon, batch);
      for (Index k = 0; k < spec.prediction_horizon; ++k)
        mc.pred.row(k) = w.head.w * mc.layers[1].h[k];
      mc.pred.array() += w.head.b(0);
      break;
    }
  }
  return mc;
}

Matrix loss_gradient(const Matrix& pred, const Matrix& target, LossKind kind) {
  const double inv = 1.0 / static_cast<double>(pred.size());
  if (kind == LossKind::Mse) return 2.0 * inv * (pred - target);
  return inv *
         (pred - target)
             .unaryExpr([](double d) {
               return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
             });
}

void model_backward(const ModelSpec& spec, const ModelWeights& w,
                    const ModelCache& mc, const Matrix& dy,
                    ModelWeights& grads) {
  const Index batch = dy.cols();
  const Index steps = spec.input_horizon;
  auto empty_seq = [](Index n) { return Seq(static_cast<std::size_t>(n)); };

  auto store = [&grads](std::size_t k, LayerGrads&& lg) {
    grads.cells[k].w_in = std::move(lg.dw_in);
    grads.cells[k].w_rec = std::move(lg.dw_rec);
    grads.cells[k].bias = std::move(lg.db);
  };

  switch (spec.kind) {
    case ModelKind::Vanilla:
    case ModelKind::Stacked: {
      const Matrix& h_final = mc.layers.back().h.back();
      grads.head.w.noalias() = dy * h_final.transpose();
      grads.head.b = dy.rowwise().sum();
      Seq dh = empty_seq(steps);
      dh[steps - 1].noalias() = w.head.w.transpose() * dy;
      for (std::size_t k = w.cells.size(); k-- > 0;) {
        LayerGrads lg =
            layer_backward(w.cells[k], mc.inputs[k], mc.layers[k], dh, k > 0);
        if (k > 0) dh = std::move(lg.dx);
        store(k, std::move(lg));
      }
      break;
    }
    case ModelKind::Bidirectional: {
      const Index u = w.cells[0].units();
      Matrix joined(2 * u, batch);
      joined.topRows(u) = mc.layers[0].h.back();
      joined.bottomRows(u) = mc.layers[1].h.back();
      grads.head.w.noalias() = dy * joined.transpose();
      grads.head.b = dy.rowwise().sum();
      const Matrix djoined = w.head.w.transpose() * dy;
      Seq dh_f = empty_seq(steps);
      Seq dh_b = empty_seq(steps);
      dh_f[steps - 1] = djoined.topRows(u);
      dh_b[steps - 1] = djoined.bottomRows(u);
      store(0, layer_backward(w.cells[0], mc.inputs[0], mc.layers[0], dh_f,
                              false));
      store(1, layer_backward(w.cells[1], mc.inputs[1], mc.layers[1], dh_b,
                              false));
      break;
    }
    case ModelKind::EncoderDecoder: {
      const Index horizon = spec.prediction_horizon;
      const Index ud = w.cells[1].units();
      grads.head.w.setZero();
      grads.head.b.setZero();
      Seq dh_dec = empty_seq(horizon);
      for (Index k = 0; k < horizon; ++k) {
        const Matrix& hk = mc.layers[1].h[k];
        grads.head.w.noalias() += dy.row(k) * hk.transpose();
        grads.head.b(0) += dy.row(k).sum();
        dh_dec[k].noalias() = w.head.w.transpose() * dy.row(k);
      }
      LayerGrads dec = layer_backward(w.cells[1], mc.inputs[1], mc.layers[1],
                                      dh_dec, true);
      Matrix dcontext = Matrix::Zero(ud, batch);
      for (const Matrix& dxk : dec.dx) dcontext += dxk;
      store(1, std::move(dec));
      grads.bridge->w.noalias() = dcontext * mc.layers[0].h.back().transpose();
      grads.bridge->b = dcontext.rowwise().sum();
      Seq dh_enc = empty_seq(steps);
      dh_enc[steps - 1].noalias() = w.bridge->w.transpose() * dcontext;
      store(0, layer_backward(w.cells[0], mc.inputs[0], mc.layers[0], dh_enc,
                              false));
      break;
    }
  }
}

}  // namespace

Matrix forward_batch(const ModelSpec& spec, const ModelWeights& w,
                     const Matrix& windows) {
  return model_forward(spec, w, windows, false).pred;
}

Vector forward_one(const ModelSpec& spec, const ModelWeights& w,
                   const Vector& window) {
  return forward_batch(spec, w, window).col(0);
}

double batch_loss(const ModelSpec& spec, const ModelWeights& w,
                  const Matrix& inputs, const Matrix& targets, LossKind kind) {
  return loss_value(model_forward(spec, w, inputs, false).pred, targets, kind);
}

double loss_and_gradients(const ModelSpec& spec, const ModelWeights& w,
                          const Matrix& inputs, const Matrix& targets,
                          LossKind kind, ModelWeights& grads) {
  ModelCache mc = model_forward(spec, w, inputs, true);
  const double loss = loss_value(mc.pred, targets, kind);
  model_backward(spec, w, mc, loss_gradient(mc.pred, targets, kind), grads);
  return loss;
}

ModelWeights bptt_gradients(const ModelSpec& spec, const ModelWeights& w,
                            const Matrix& inputs, const Matrix& targets,
                            LossKind kind) {
  ModelWeights grads = zeros_like(w);
  loss_and_gradients(spec, w, inputs, targets, kind, grads);
  return grads;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

double dataset_loss(const ModelSpec& spec, const ModelWeights& w,
                    const data::WindowedDataset& ds, Index batch_size,
                    LossKind kind) {
  const Index n = ds.count();
  if (n < 1) throw std::invalid_argument("empty dataset");
  double sum = 0.0;
  for (Index start = 0; start < n; start += batch_size) {
    const Index bs = std::min(batch_size, n - start);
    const double loss =
        batch_loss(spec, w, ds.inputs.middleCols(start, bs),
                   ds.targets.middleCols(start, bs), kind);
    sum += loss * static_cast<double>(bs);
  }
  return sum / static_cast<double>(n);
}

namespace {

void check_dataset(const ModelSpec& spec, const data::WindowedDataset& ds,
                   const char* name) {
  if (ds.count() < 1)
    throw std::invalid_argument(std::string(name) + " set has no windows");
  if (ds.input_horizon() != spec.input_horizon ||
      ds.prediction_horizon() != spec.prediction_horizon)
    throw std::invalid_argument(std::string(name) +
                                " set horizons do not match the model spec");
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const data::WindowedDataset& train_ds,
                   const data::WindowedDataset& val_ds,
                   const TrainOptions& opts, num::Rng& rng) {
  spec.validate();
  if (opts.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (opts.batch_size < 1)
    throw std::invalid_argument("batch_size must be >= 1");
  check_dataset(spec, train_ds, "training");
  check_dataset(spec, val_ds, "validation");

  ModelWeights w = init_weights(spec, rng);
  AdamState adam = make_adam_state(w, opts.learning_rate);
  ModelWeights grads = zeros_like(w);

  const Index n = train_ds.count();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  TrainedModel out;
  out.spec = spec;
  out.history.reserve(static_cast<std::size_t>(opts.epochs));
  double best_val = std::numeric_limits<double>::infinity();

  Matrix x, y;
  for (Index epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (Index start = 0, batch_no = 0; start < n;
         start += opts.batch_size, ++batch_no) {
      const Index bs = std::min(opts.batch_size, n - start);
      x.resize(train_ds.input_horizon(), bs);
      y.resize(train_ds.prediction_horizon(), bs);
      for (Index j = 0; j < bs; ++j) {
        x.col(j) = train_ds.inputs.col(order[static_cast<std::size_t>(start + j)]);
        y.col(j) = train_ds.targets.col(order[static_cast<std::size_t>(start + j)]);
      }
      const double loss = loss_and_gradients(spec, w, x, y, opts.loss, grads);
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite training loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_no));
      if (opts.clip_norm > 0.0) clip_global_norm(grads, opts.clip_norm);
      adam_step(w, grads, adam);
      loss_sum += loss * static_cast<double>(bs);
    }
    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.val_loss = dataset_loss(spec, w, val_ds, opts.batch_size, opts.loss);
    if (!std::isfinite(stats.val_loss))
      throw std::runtime_error("non-finite validation loss at epoch " +
                               std::to_string(epoch));
    out.history.push_back(stats);
    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      out.best_epoch = epoch;
      out.weights = w;
    }
  }
  return out;
}

}  // namespace birdcast::nn
