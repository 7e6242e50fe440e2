#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/matrix.hpp"

namespace tactx::nn {

enum class Activation : std::uint8_t { identity = 0, tanh = 1 };

// One dense layer: y = act(W x + b), W is out x in, b is out x 1. Batches are
// matrices with one column per sample.
struct DenseLayer {
  num::Matrix w;
  num::Matrix b;
  Activation act = Activation::identity;
};

struct MlpModel {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().w.cols(); }
  std::size_t output_dim() const { return layers.back().w.rows(); }
};

// Checks the dimension chain; `final_identity` additionally requires the last
// activation to be identity (projection networks and decoders end linear,
// encoder trunks end in their hidden nonlinearity).
inline void validate(const MlpModel& m, bool final_identity = true) {
  if (m.layers.empty()) throw ShapeError("MlpModel: no layers");
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const DenseLayer& l = m.layers[i];
    if (l.w.rows() == 0 || l.w.cols() == 0) throw ShapeError("MlpModel: empty layer");
    if (l.b.rows() != l.w.rows() || l.b.cols() != 1) {
      throw ShapeError("MlpModel: bias shape mismatch at layer " + std::to_string(i));
    }
    if (i > 0 && m.layers[i - 1].w.rows() != l.w.cols()) {
      throw ShapeError("MlpModel: dimension chain broken at layer " + std::to_string(i));
    }
  }
  if (final_identity && m.layers.back().act != Activation::identity) {
    throw ShapeError("MlpModel: final layer must be identity");
  }
}

namespace detail {
inline num::Matrix affine(const DenseLayer& l, const num::Matrix& x) {
  num::Matrix z = num::matmul(l.w, x);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const double bias = l.b(r, 0);
    for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) += bias;
  }
  return z;
}
}  // namespace detail

// Returns [input, act_1, ..., act_L]; the caller keeps the list for backward.
inline std::vector<num::Matrix> mlp_forward(const MlpModel& m, const num::Matrix& x) {
  if (x.rows() != m.input_dim()) {
    throw ShapeError("mlp_forward: input dim " + std::to_string(x.rows()) +
                     " != " + std::to_string(m.input_dim()));
  }
  std::vector<num::Matrix> acts;
  acts.reserve(m.layers.size() + 1);
  acts.push_back(x);
  for (const DenseLayer& l : m.layers) {
    num::Matrix z = detail::affine(l, acts.back());
    if (l.act == Activation::tanh) {
      for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = std::tanh(z.data()[i]);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

inline const num::Matrix& mlp_output(const std::vector<num::Matrix>& acts) {
  return acts.back();
}

struct LayerGrads {
  num::Matrix dw;
  num::Matrix db;
};

struct MlpGradients {
  std::vector<LayerGrads> layers;
  num::Matrix input_grad;
};

// Exact reverse-mode gradients of the forward map for a given upstream
// gradient. tanh' is recovered from the stored post-activation (1 - a^2).
inline MlpGradients mlp_backward(const MlpModel& m, const std::vector<num::Matrix>& acts,
                                 const num::Matrix& output_grad) {
  if (acts.size() != m.layers.size() + 1) {
    throw ShapeError("mlp_backward: activation list does not match model depth");
  }
  if (output_grad.rows() != m.output_dim() || output_grad.cols() != acts.back().cols()) {
    throw ShapeError("mlp_backward: output_grad shape mismatch");
  }

  MlpGradients g;
  g.layers.resize(m.layers.size());
  num::Matrix dz = output_grad;
  for (std::size_t li = m.layers.size(); li-- > 0;) {
    const DenseLayer& l = m.layers[li];
    const num::Matrix& a = acts[li + 1];
    if (l.act == Activation::tanh) {
      for (std::size_t i = 0; i < dz.size(); ++i) {
        dz.data()[i] *= 1.0 - a.data()[i] * a.data()[i];
      }
    }
    g.layers[li].dw = num::matmul(dz, num::transpose(acts[li]));
    num::Matrix db(l.b.rows(), 1);
    for (std::size_t r = 0; r < dz.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dz.cols(); ++c) acc += dz(r, c);
      db(r, 0) = acc;
    }
    g.layers[li].db = std::move(db);
    dz = num::matmul(num::transpose(l.w), dz);
  }
  g.input_grad = std::move(dz);
  return g;
}

}  // namespace tactx::nn
