#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include "tactx/adam.hpp"
#include "tactx/errors.hpp"
#include "tactx/matrix.hpp"
#include "tactx/mlp.hpp"
#include "tactx/prng.hpp"
#include "tactx/vae.hpp"

namespace tactx::nn {

// Layer widths including input and output, e.g. {8, 64, 64, 16}.
struct MlpArch {
  std::vector<std::size_t> dims;
};

// Encoder widths from input down to the last hidden, plus the latent size.
// The decoder mirrors the encoder.
struct VaeArch {
  std::vector<std::size_t> encoder_dims;
  std::size_t latent_dim = 0;
};

namespace detail {

// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases. Weights
// fill row-major from the stream so layer shape fixes the draw order.
inline DenseLayer init_layer(std::size_t in, std::size_t out, Activation act,
                             num::Prng& rng) {
  DenseLayer l;
  l.w = num::Matrix(out, in);
  l.b = num::Matrix(out, 1);
  l.act = act;
  const double bound = std::sqrt(6.0 / double(in + out));
  for (std::size_t i = 0; i < l.w.size(); ++i) l.w.data()[i] = rng.uniform(-bound, bound);
  return l;
}

// Root-mean-square of all entries. Dividing by it puts the data at unit
// second moment, which keeps the reconstruction loss commensurate with the
// beta-weighted KL term; a peak-based scale would shrink sparse fields so far
// that the KL penalty dominates and the latent code collapses.
inline double data_scale(const num::Matrix& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m.data()[i] * m.data()[i];
  const double rms = std::sqrt(acc / double(m.size()));
  return rms > 0.0 ? rms : 1.0;
}

// Cosine anneal from learning_rate down to learning_rate * lr_floor across
// the whole run. lr_floor = 1 reduces to a constant rate.
inline double annealed_lr(const TrainHyper& h, std::size_t epoch) {
  if (h.lr_floor == 1.0 || h.epochs < 2) return h.learning_rate;
  const double w =
      0.5 * (1.0 + std::cos(std::numbers::pi * double(epoch) / double(h.epochs - 1)));
  return h.learning_rate * (h.lr_floor + (1.0 - h.lr_floor) * w);
}

inline void shuffle_indices(std::vector<std::size_t>& idx, num::Prng& rng) {
  for (std::size_t i = idx.size(); i-- > 1;) {
    const std::size_t j = std::size_t(rng.uniform() * double(i + 1));
    std::swap(idx[i], idx[j]);
  }
}

inline num::Matrix gather_columns(const num::Matrix& data,
                                  const std::vector<std::size_t>& idx,
                                  std::size_t begin, std::size_t end) {
  num::Matrix out(data.rows(), end - begin);
  for (std::size_t j = begin; j < end; ++j) {
    const std::size_t src = idx[j];
    for (std::size_t r = 0; r < data.rows(); ++r) out(r, j - begin) = data(r, src);
  }
  return out;
}

}  // namespace detail

inline MlpModel init_mlp(const MlpArch& arch, num::Prng& rng) {
  if (arch.dims.size() < 2) throw ShapeError("init_mlp: need at least input and output dims");
  MlpModel m;
  for (std::size_t i = 0; i + 1 < arch.dims.size(); ++i) {
    const bool last = i + 2 == arch.dims.size();
    m.layers.push_back(detail::init_layer(arch.dims[i], arch.dims[i + 1],
                                          last ? Activation::identity : Activation::tanh,
                                          rng));
  }
  validate(m);
  return m;
}

inline VaeModel init_vae(const VaeArch& arch, num::Prng& rng) {
  if (arch.encoder_dims.size() < 2 || arch.latent_dim == 0) {
    throw ShapeError("init_vae: need encoder dims and a positive latent size");
  }
  VaeModel v;
  v.latent_dim = arch.latent_dim;
  for (std::size_t i = 0; i + 1 < arch.encoder_dims.size(); ++i) {
    v.encoder_trunk.layers.push_back(detail::init_layer(
        arch.encoder_dims[i], arch.encoder_dims[i + 1], Activation::tanh, rng));
  }
  const std::size_t hidden = arch.encoder_dims.back();
  v.mu_head.layers.push_back(
      detail::init_layer(hidden, arch.latent_dim, Activation::identity, rng));
  v.logvar_head.layers.push_back(
      detail::init_layer(hidden, arch.latent_dim, Activation::identity, rng));
  std::size_t prev = arch.latent_dim;
  for (std::size_t i = arch.encoder_dims.size(); i-- > 0;) {
    const bool last = i == 0;
    v.decoder.layers.push_back(detail::init_layer(
        prev, arch.encoder_dims[i], last ? Activation::identity : Activation::tanh, rng));
    prev = arch.encoder_dims[i];
  }
  validate(v);
  return v;
}

// Observer invoked after each epoch with the epoch index and its mean loss.
// Purely informational; training is unaffected by it.
using EpochHook = std::function<void(std::size_t, double)>;

struct TrainedMlp {
  MlpModel model;
  std::vector<double> loss_history;
};

struct TrainedVae {
  VaeModel model;
  std::vector<double> loss_history;
};

// Minibatch Adam on mean-squared error. Inputs and targets hold one sample
// per column. Data is rescaled to unit RMS for optimization and the scales
// are folded back into the first and last layers, so the returned model maps
// raw inputs to raw outputs. epochs = 0 returns the untouched initialization.
inline TrainedMlp train_network(const MlpArch& arch, const num::Matrix& inputs,
                                const num::Matrix& targets, const TrainHyper& hyper,
                                const EpochHook& on_epoch = {}) {
  validate(hyper);
  if (inputs.cols() == 0) throw ShapeError("train_network: empty dataset");
  if (inputs.cols() != targets.cols()) throw ShapeError("train_network: sample counts differ");
  if (arch.dims.empty() || inputs.rows() != arch.dims.front() ||
      targets.rows() != arch.dims.back()) {
    throw ShapeError("train_network: data dims do not match architecture");
  }

  num::Prng rng(hyper.seed);
  TrainedMlp out;
  out.model = init_mlp(arch, rng);
  if (hyper.epochs == 0) return out;

  const double s_in = detail::data_scale(inputs);
  const double s_out = detail::data_scale(targets);
  num::Matrix xn = num::scale(inputs, 1.0 / s_in);
  num::Matrix yn = num::scale(targets, 1.0 / s_out);

  std::vector<num::Matrix*> params = collect_params(out.model);
  AdamState adam = make_adam_state(to_const_ptrs(params));

  const std::size_t n = xn.cols();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  TrainHyper eh = hyper;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    eh.learning_rate = detail::annealed_lr(hyper, epoch);
    detail::shuffle_indices(idx, rng);
    double epoch_loss = 0.0;
    for (std::size_t b0 = 0; b0 < n; b0 += hyper.batch_size) {
      const std::size_t b1 = std::min(n, b0 + hyper.batch_size);
      num::Matrix x = detail::gather_columns(xn, idx, b0, b1);
      num::Matrix y = detail::gather_columns(yn, idx, b0, b1);
      std::vector<num::Matrix> acts = mlp_forward(out.model, x);
      const num::Matrix& pred = acts.back();

      num::Matrix dout(pred.rows(), pred.cols());
      double loss = 0.0;
      const double inv = 1.0 / double(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data()[i] - y.data()[i];
        loss += d * d * inv;
        dout.data()[i] = 2.0 * d * inv;
      }
      MlpGradients grads = mlp_backward(out.model, acts, dout);
      adam_step(adam, params, collect_grads(grads), eh);
      epoch_loss += loss * double(b1 - b0);
    }
    out.loss_history.push_back(epoch_loss / double(n));
    if (on_epoch) on_epoch(epoch, out.loss_history.back());
  }

  // Fold the scales so callers never see them: the first layer absorbs the
  // input scale, the identity output layer the target scale.
  num::Matrix& w0 = out.model.layers.front().w;
  for (std::size_t i = 0; i < w0.size(); ++i) w0.data()[i] /= s_in;
  DenseLayer& lastl = out.model.layers.back();
  for (std::size_t i = 0; i < lastl.w.size(); ++i) lastl.w.data()[i] *= s_out;
  for (std::size_t i = 0; i < lastl.b.size(); ++i) lastl.b.data()[i] *= s_out;
  return out;
}

// Minibatch Adam on the beta-weighted VAE objective; the model reconstructs
// its own input. Scale folding as above (encoder first layer and decoder
// output layer), so latents are those of the unit-RMS data.
inline TrainedVae train_network(const VaeArch& arch, const num::Matrix& data,
                                const TrainHyper& hyper,
                                const EpochHook& on_epoch = {}) {
  validate(hyper);
  if (data.cols() == 0) throw ShapeError("train_network: empty dataset");
  if (arch.encoder_dims.empty() || data.rows() != arch.encoder_dims.front()) {
    throw ShapeError("train_network: data dims do not match architecture");
  }

  num::Prng rng(hyper.seed);
  TrainedVae out;
  out.model = init_vae(arch, rng);
  if (hyper.epochs == 0) return out;

  const double s = detail::data_scale(data);
  num::Matrix xn = num::scale(data, 1.0 / s);

  std::vector<num::Matrix*> params = collect_params(out.model);
  AdamState adam = make_adam_state(to_const_ptrs(params));

  const std::size_t n = xn.cols();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  TrainHyper eh = hyper;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    eh.learning_rate = detail::annealed_lr(hyper, epoch);
    detail::shuffle_indices(idx, rng);
    double epoch_loss = 0.0;
    for (std::size_t b0 = 0; b0 < n; b0 += hyper.batch_size) {
      const std::size_t b1 = std::min(n, b0 + hyper.batch_size);
      num::Matrix x = detail::gather_columns(xn, idx, b0, b1);
      num::Matrix eps(arch.latent_dim, b1 - b0);
      for (std::size_t i = 0; i < eps.size(); ++i) eps.data()[i] = rng.gaussian();

      VaeForward f = vae_forward(out.model, x, &eps);
      const VaeLoss loss = vae_loss(f.dec_acts.back(), x, f.mu_acts.back(),
                                    f.logvar_acts.back(), hyper.beta);
      VaeGradients grads = vae_backward(out.model, f, x, hyper.beta);
      adam_step(adam, params, collect_grads(grads), eh);
      epoch_loss += loss.total * double(b1 - b0);
    }
    out.loss_history.push_back(epoch_loss / double(n));
    if (on_epoch) on_epoch(epoch, out.loss_history.back());
  }

  num::Matrix& w0 = out.model.encoder_trunk.layers.front().w;
  for (std::size_t i = 0; i < w0.size(); ++i) w0.data()[i] /= s;
  DenseLayer& lastl = out.model.decoder.layers.back();
  for (std::size_t i = 0; i < lastl.w.size(); ++i) lastl.w.data()[i] *= s;
  for (std::size_t i = 0; i < lastl.b.size(); ++i) lastl.b.data()[i] *= s;
  return out;
}

}  // namespace tactx::nn
