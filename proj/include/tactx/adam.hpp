#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/matrix.hpp"
#include "tactx/mlp.hpp"

namespace tactx::nn {

struct TrainHyper {
  double beta = 1e-3;  // KL weight for the variational networks
  double learning_rate = 1e-3;
  double lr_floor = 1.0;  // final fraction of learning_rate under cosine annealing; 1 = constant
  std::size_t batch_size = 64;
  std::size_t epochs = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

inline void validate(const TrainHyper& h) {
  if (!(h.beta >= 0.0)) throw DomainError("TrainHyper: beta must be >= 0");
  if (!(h.learning_rate > 0.0)) throw DomainError("TrainHyper: learning_rate must be > 0");
  if (!(h.lr_floor > 0.0 && h.lr_floor <= 1.0)) {
    throw DomainError("TrainHyper: lr_floor must be in (0, 1]");
  }
  if (h.batch_size < 1) throw DomainError("TrainHyper: batch_size must be >= 1");
}

// First/second moment buffers, one per parameter tensor, in the same order
// the parameters are visited during updates.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<num::Matrix> m;
  std::vector<num::Matrix> v;
};

inline AdamState make_adam_state(const std::vector<const num::Matrix*>& params) {
  AdamState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const num::Matrix* p : params) {
    s.m.emplace_back(p->rows(), p->cols());
    s.v.emplace_back(p->rows(), p->cols());
  }
  return s;
}

// Standard Adam with bias correction; epsilon sits outside the square root.
inline void adam_step(AdamState& state, const std::vector<num::Matrix*>& params,
                      const std::vector<const num::Matrix*>& grads,
                      const TrainHyper& hyper) {
  if (params.size() != state.m.size() || grads.size() != params.size()) {
    throw ShapeError("adam_step: parameter/gradient/state counts differ");
  }
  state.step += 1;
  const double b1 = hyper.adam_beta1, b2 = hyper.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, double(state.step));
  const double corr2 = 1.0 - std::pow(b2, double(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    num::Matrix& p = *params[t];
    const num::Matrix& g = *grads[t];
    if (!p.same_shape(g) || !p.same_shape(state.m[t])) {
      throw ShapeError("adam_step: shape mismatch at tensor " + std::to_string(t));
    }
    double* pm = state.m[t].data();
    double* pv = state.v[t].data();
    double* pp = p.data();
    const double* pg = g.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      pm[i] = b1 * pm[i] + (1.0 - b1) * pg[i];
      pv[i] = b2 * pv[i] + (1.0 - b2) * pg[i] * pg[i];
      const double mhat = pm[i] / corr1;
      const double vhat = pv[i] / corr2;
      pp[i] -= hyper.learning_rate * mhat / (std::sqrt(vhat) + hyper.adam_eps);
    }
  }
}

inline std::vector<num::Matrix*> collect_params(MlpModel& m) {
  std::vector<num::Matrix*> out;
  out.reserve(2 * m.layers.size());
  for (DenseLayer& l : m.layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

inline std::vector<const num::Matrix*> collect_grads(const MlpGradients& g) {
  std::vector<const num::Matrix*> out;
  out.reserve(2 * g.layers.size());
  for (const LayerGrads& l : g.layers) {
    out.push_back(&l.dw);
    out.push_back(&l.db);
  }
  return out;
}

inline std::vector<const num::Matrix*> to_const_ptrs(const std::vector<num::Matrix*>& v) {
  return {v.begin(), v.end()};
}

}  // namespace tactx::nn
