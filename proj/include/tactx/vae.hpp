#pragma once

#include <cmath>
#include <vector>

#include "tactx/adam.hpp"
#include "tactx/errors.hpp"
#include "tactx/matrix.hpp"
#include "tactx/mlp.hpp"
#include "tactx/prng.hpp"

namespace tactx::nn {

// Variational autoencoder: tanh encoder trunk, linear mu/logvar heads reading
// the last hidden activation, and a decoder mirroring the trunk back to input
// space.
struct VaeModel {
  MlpModel encoder_trunk;
  MlpModel mu_head;      // single identity layer
  MlpModel logvar_head;  // single identity layer
  MlpModel decoder;
  std::size_t latent_dim = 0;
};

inline void validate(const VaeModel& v) {
  validate(v.encoder_trunk, /*final_identity=*/false);
  validate(v.mu_head);
  validate(v.logvar_head);
  validate(v.decoder);
  if (v.mu_head.layers.size() != 1 || v.logvar_head.layers.size() != 1) {
    throw ShapeError("VaeModel: latent heads must be single layers");
  }
  if (v.mu_head.output_dim() != v.latent_dim || v.logvar_head.output_dim() != v.latent_dim) {
    throw ShapeError("VaeModel: head output dims differ from latent_dim");
  }
  const std::size_t hidden = v.encoder_trunk.output_dim();
  if (v.mu_head.input_dim() != hidden || v.logvar_head.input_dim() != hidden) {
    throw ShapeError("VaeModel: head input dims differ from trunk output");
  }
  if (v.decoder.input_dim() != v.latent_dim) {
    throw ShapeError("VaeModel: decoder input dim differs from latent_dim");
  }
  if (v.decoder.output_dim() != v.encoder_trunk.input_dim()) {
    throw ShapeError("VaeModel: decoder output dim differs from encoder input");
  }
}

// Everything backward needs: per-submodule activation lists, the noise that
// was used, and the sampled latent.
struct VaeForward {
  std::vector<num::Matrix> trunk_acts;
  std::vector<num::Matrix> mu_acts;
  std::vector<num::Matrix> logvar_acts;
  num::Matrix eps;  // latent x batch; zero when deterministic
  num::Matrix z;
  std::vector<num::Matrix> dec_acts;
};

// z = mu + exp(logvar/2) .* eps. Pass eps = nullptr for the deterministic
// mean pass (eps = 0).
inline VaeForward vae_forward(const VaeModel& v, const num::Matrix& x,
                              const num::Matrix* eps) {
  VaeForward f;
  f.trunk_acts = mlp_forward(v.encoder_trunk, x);
  const num::Matrix& hidden = f.trunk_acts.back();
  f.mu_acts = mlp_forward(v.mu_head, hidden);
  f.logvar_acts = mlp_forward(v.logvar_head, hidden);
  const num::Matrix& mu = f.mu_acts.back();
  const num::Matrix& logvar = f.logvar_acts.back();

  if (eps != nullptr) {
    if (!eps->same_shape(mu)) throw ShapeError("vae_forward: eps shape mismatch");
    f.eps = *eps;
  } else {
    f.eps = num::Matrix(mu.rows(), mu.cols());
  }
  f.z = mu;
  for (std::size_t i = 0; i < f.z.size(); ++i) {
    f.z.data()[i] += std::exp(0.5 * logvar.data()[i]) * f.eps.data()[i];
  }
  f.dec_acts = mlp_forward(v.decoder, f.z);
  return f;
}

struct VaeEncoding {
  num::Matrix mu;
  num::Matrix logvar;
  num::Matrix z;
};

inline VaeEncoding vae_encode(const VaeModel& v, const num::Matrix& x,
                              num::Prng* rng = nullptr) {
  std::vector<num::Matrix> trunk = mlp_forward(v.encoder_trunk, x);
  VaeEncoding e;
  e.mu = mlp_forward(v.mu_head, trunk.back()).back();
  e.logvar = mlp_forward(v.logvar_head, trunk.back()).back();
  e.z = e.mu;
  if (rng != nullptr) {
    for (std::size_t i = 0; i < e.z.size(); ++i) {
      e.z.data()[i] += std::exp(0.5 * e.logvar.data()[i]) * rng->gaussian();
    }
  }
  return e;
}

inline num::Matrix vae_encode_mean(const VaeModel& v, const num::Matrix& x) {
  return vae_encode(v, x).mu;
}

inline num::Matrix vae_decode(const VaeModel& v, const num::Matrix& z) {
  return mlp_forward(v.decoder, z).back();
}

struct VaeLoss {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// recon = mean squared error over dims and batch; kl = batch mean of the
// closed-form KL(N(mu, e^logvar) || N(0, I)).
inline VaeLoss vae_loss(const num::Matrix& recon, const num::Matrix& target,
                        const num::Matrix& mu, const num::Matrix& logvar, double beta) {
  if (!recon.same_shape(target)) throw ShapeError("vae_loss: recon/target shapes differ");
  if (!mu.same_shape(logvar)) throw ShapeError("vae_loss: mu/logvar shapes differ");
  if (recon.cols() != mu.cols()) throw ShapeError("vae_loss: batch sizes differ");

  VaeLoss out;
  for (std::size_t i = 0; i < recon.size(); ++i) {
    const double d = recon.data()[i] - target.data()[i];
    out.recon += d * d;
  }
  out.recon /= double(recon.size());

  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu.data()[i];
    const double lv = logvar.data()[i];
    out.kl += 0.5 * (m * m + std::exp(lv) - 1.0 - lv);
  }
  out.kl /= double(mu.cols());

  out.total = out.recon + beta * out.kl;
  return out;
}

struct VaeGradients {
  MlpGradients trunk;
  MlpGradients mu;
  MlpGradients logvar;
  MlpGradients dec;
};

// Gradients of vae_loss(total) with respect to every parameter, for the
// forward pass `f` against `target`.
inline VaeGradients vae_backward(const VaeModel& v, const VaeForward& f,
                                 const num::Matrix& target, double beta) {
  const num::Matrix& recon = f.dec_acts.back();
  const num::Matrix& mu = f.mu_acts.back();
  const num::Matrix& logvar = f.logvar_acts.back();
  const std::size_t batch = target.cols();

  // d recon_term / d recon.
  num::Matrix drecon(recon.rows(), recon.cols());
  const double recon_scale = 2.0 / double(recon.size());
  for (std::size_t i = 0; i < recon.size(); ++i) {
    drecon.data()[i] = recon_scale * (recon.data()[i] - target.data()[i]);
  }

  VaeGradients g;
  g.dec = mlp_backward(v.decoder, f.dec_acts, drecon);
  const num::Matrix& dz = g.dec.input_grad;

  // z = mu + exp(logvar/2) .* eps, plus the KL terms taken directly on the
  // head outputs.
  num::Matrix dmu = dz;
  num::Matrix dlogvar(logvar.rows(), logvar.cols());
  const double kl_scale = beta / double(batch);
  for (std::size_t i = 0; i < dlogvar.size(); ++i) {
    const double lv = logvar.data()[i];
    const double sigma = std::exp(0.5 * lv);
    dlogvar.data()[i] = dz.data()[i] * 0.5 * sigma * f.eps.data()[i] +
                        kl_scale * 0.5 * (std::exp(lv) - 1.0);
    dmu.data()[i] += kl_scale * mu.data()[i];
  }

  g.mu = mlp_backward(v.mu_head, f.mu_acts, dmu);
  g.logvar = mlp_backward(v.logvar_head, f.logvar_acts, dlogvar);

  num::Matrix dhidden = num::add(g.mu.input_grad, g.logvar.input_grad);
  g.trunk = mlp_backward(v.encoder_trunk, f.trunk_acts, dhidden);
  return g;
}

inline std::vector<num::Matrix*> collect_params(VaeModel& v) {
  std::vector<num::Matrix*> out = collect_params(v.encoder_trunk);
  for (num::Matrix* p : collect_params(v.mu_head)) out.push_back(p);
  for (num::Matrix* p : collect_params(v.logvar_head)) out.push_back(p);
  for (num::Matrix* p : collect_params(v.decoder)) out.push_back(p);
  return out;
}

inline std::vector<const num::Matrix*> collect_grads(const VaeGradients& g) {
  std::vector<const num::Matrix*> out = collect_grads(g.trunk);
  for (const num::Matrix* p : collect_grads(g.mu)) out.push_back(p);
  for (const num::Matrix* p : collect_grads(g.logvar)) out.push_back(p);
  for (const num::Matrix* p : collect_grads(g.dec)) out.push_back(p);
  return out;
}

}  // namespace tactx::nn
