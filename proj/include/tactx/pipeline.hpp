#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/field.hpp"
#include "tactx/geometry.hpp"
#include "tactx/matrix.hpp"
#include "tactx/render.hpp"
#include "tactx/surface.hpp"
#include "tactx/train.hpp"
#include "tactx/vae.hpp"

namespace tactx::pipeline {

// Identifies one of the five networks in the conversion chain. Values are
// stable and appear in serialized model files.
enum class NetRole : std::uint32_t {
  svb = 1,    // signal autoencoder (19 electrode values)
  mvb = 2,    // BioTac field autoencoder (64x64 grid)
  mvd = 3,    // DIGIT field autoencoder (64x64 grid)
  s2mpn = 4,  // signal latent -> BioTac field latent
  m2mpn = 5,  // BioTac field latent -> DIGIT field latent
};

inline const char* to_string(NetRole r) {
  switch (r) {
    case NetRole::svb: return "svb";
    case NetRole::mvb: return "mvb";
    case NetRole::mvd: return "mvd";
    case NetRole::s2mpn: return "s2mpn";
    case NetRole::m2mpn: return "m2mpn";
  }
  return "unknown";
}

struct PipelineModels {
  nn::VaeModel svb;
  nn::VaeModel mvb;
  nn::VaeModel mvd;
  nn::MlpModel s2mpn;
  nn::MlpModel m2mpn;
};

// Valid models form a composable chain: each projection net maps between the
// latent spaces of the autoencoders on its two sides.
inline void validate(const PipelineModels& m) {
  nn::validate(m.svb);
  nn::validate(m.mvb);
  nn::validate(m.mvd);
  nn::validate(m.s2mpn);
  nn::validate(m.m2mpn);
  constexpr std::size_t mesh = kFieldGrid * kFieldGrid;
  if (m.svb.encoder_trunk.input_dim() != kElectrodeCount) {
    throw ShapeError("pipeline: svb must take " + std::to_string(kElectrodeCount) +
                     " electrode values, takes " +
                     std::to_string(m.svb.encoder_trunk.input_dim()));
  }
  if (m.mvb.encoder_trunk.input_dim() != mesh || m.mvd.encoder_trunk.input_dim() != mesh) {
    throw ShapeError("pipeline: field autoencoders must take " + std::to_string(mesh) +
                     " grid values");
  }
  if (m.s2mpn.input_dim() != m.svb.latent_dim || m.s2mpn.output_dim() != m.mvb.latent_dim) {
    throw ShapeError("pipeline: s2mpn maps " + std::to_string(m.s2mpn.input_dim()) + "->" +
                     std::to_string(m.s2mpn.output_dim()) + ", latents are " +
                     std::to_string(m.svb.latent_dim) + "->" + std::to_string(m.mvb.latent_dim));
  }
  if (m.m2mpn.input_dim() != m.mvb.latent_dim || m.m2mpn.output_dim() != m.mvd.latent_dim) {
    throw ShapeError("pipeline: m2mpn maps " + std::to_string(m.m2mpn.input_dim()) + "->" +
                     std::to_string(m.m2mpn.output_dim()) + ", latents are " +
                     std::to_string(m.mvb.latent_dim) + "->" + std::to_string(m.mvd.latent_dim));
  }
}

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// 80/10/10 partition of [0, count) by a seeded shuffle. Validation and test
// each take floor(count/10) indices, train the remainder, so every index
// lands in exactly one slice.
inline DatasetSplit split_dataset(std::size_t count, std::uint64_t seed) {
  if (count < 10) {
    throw DomainError("split_dataset: need at least 10 samples, got " + std::to_string(count));
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  num::Prng rng(seed);
  nn::detail::shuffle_indices(order, rng);
  const std::size_t n_hold = count / 10;
  const std::size_t n_train = count - 2 * n_hold;
  DatasetSplit s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.val.assign(order.begin() + n_train, order.begin() + n_train + n_hold);
  s.test.assign(order.begin() + n_train + n_hold, order.end());
  return s;
}

// One sample per column: signals stack the 19 electrode values.
inline num::Matrix pack_signals(const std::vector<PairedSample>& samples,
                                const std::vector<std::size_t>& idx) {
  num::Matrix out(kElectrodeCount, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const ElectrodeFrame& s = samples.at(idx[j]).signal;
    for (std::size_t d = 0; d < kElectrodeCount; ++d) out(d, j) = s[d];
  }
  return out;
}

// One sample per column: fields stack the 64x64 grid in row-major node order.
inline num::Matrix pack_fields(const std::vector<PairedSample>& samples,
                               const std::vector<std::size_t>& idx, SensorKind kind) {
  constexpr std::size_t mesh = kFieldGrid * kFieldGrid;
  num::Matrix out(mesh, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const PairedSample& s = samples.at(idx[j]);
    const DeformationField& f = kind == SensorKind::biotac ? s.biotac_field : s.digit_field;
    require_kind(f, kind, "pack_fields");
    for (std::size_t d = 0; d < mesh; ++d) out(d, j) = f.values.data()[d];
  }
  return out;
}

// Appends the three grid mirrors of every packed field column (horizontal,
// vertical, both). The surface grids and the default sampling box are
// symmetric about the pad center, so each mirrored field is exactly the field
// of a valid reflected contact; training on them quadruples the effective
// dataset without leaving the data distribution.
inline num::Matrix augment_with_mirrors(const num::Matrix& pack) {
  constexpr std::size_t g = kFieldGrid;
  if (pack.rows() != g * g) {
    throw ShapeError("augment_with_mirrors: expected " + std::to_string(g * g) +
                     " rows, got " + std::to_string(pack.rows()));
  }
  const std::size_t n = pack.cols();
  num::Matrix out(pack.rows(), n * 4);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < g; ++r) {
      for (std::size_t q = 0; q < g; ++q) {
        const double v = pack(r * g + q, c);
        out(r * g + q, c) = v;
        out(r * g + (g - 1 - q), n + c) = v;
        out((g - 1 - r) * g + q, 2 * n + c) = v;
        out((g - 1 - r) * g + (g - 1 - q), 3 * n + c) = v;
      }
    }
  }
  return out;
}

struct PipelineConfig {
  nn::VaeArch svb_arch;
  nn::VaeArch mvb_arch;
  nn::VaeArch mvd_arch;
  nn::MlpArch s2mpn_arch;
  nn::MlpArch m2mpn_arch;
  nn::TrainHyper svb_hyper;
  nn::TrainHyper mvb_hyper;
  nn::TrainHyper mvd_hyper;
  nn::TrainHyper s2mpn_hyper;
  nn::TrainHyper m2mpn_hyper;
  std::uint64_t split_seed = 0;
};

// Defaults sized for a few-thousand-sample spherical-contact dataset. Each
// network trains from its own seed derived from `seed`, so retraining any
// one of them in isolation reproduces its slice of a full run.
inline PipelineConfig default_pipeline_config(std::uint64_t seed) {
  PipelineConfig c;
  c.split_seed = seed;
  c.svb_arch = {{kElectrodeCount, 128, 64}, 8};
  c.mvb_arch = {{kFieldGrid * kFieldGrid, 512, 128}, 16};
  c.mvd_arch = {{kFieldGrid * kFieldGrid, 512, 128}, 16};
  c.s2mpn_arch = {{8, 64, 64, 16}};
  c.m2mpn_arch = {{16, 64, 64, 16}};
  c.svb_hyper.seed = seed + 1;
  c.mvb_hyper.seed = seed + 2;
  c.mvd_hyper.seed = seed + 3;
  c.s2mpn_hyper.seed = seed + 4;
  c.m2mpn_hyper.seed = seed + 5;
  c.svb_hyper.epochs = 150;
  c.mvb_hyper.epochs = 30;
  c.mvd_hyper.epochs = 30;
  c.s2mpn_hyper.epochs = 400;
  c.m2mpn_hyper.epochs = 400;
  for (nn::TrainHyper* h :
       {&c.svb_hyper, &c.mvb_hyper, &c.mvd_hyper, &c.s2mpn_hyper, &c.m2mpn_hyper}) {
    h->lr_floor = 0.05;
  }
  // The field autoencoders reconstruct sparse localized bumps; a lighter KL
  // weight keeps the code from washing them out.
  c.mvb_hyper.beta = 1e-4;
  c.mvd_hyper.beta = 1e-4;
  return c;
}

inline void validate(const PipelineConfig& c) {
  nn::validate(c.svb_hyper);
  nn::validate(c.mvb_hyper);
  nn::validate(c.mvd_hyper);
  nn::validate(c.s2mpn_hyper);
  nn::validate(c.m2mpn_hyper);
  constexpr std::size_t mesh = kFieldGrid * kFieldGrid;
  if (c.svb_arch.encoder_dims.size() < 2 || c.svb_arch.encoder_dims.front() != kElectrodeCount ||
      c.svb_arch.latent_dim == 0) {
    throw ShapeError("pipeline config: svb encoder must start at " +
                     std::to_string(kElectrodeCount));
  }
  if (c.mvb_arch.encoder_dims.size() < 2 || c.mvb_arch.encoder_dims.front() != mesh ||
      c.mvb_arch.latent_dim == 0 || c.mvd_arch.encoder_dims.size() < 2 ||
      c.mvd_arch.encoder_dims.front() != mesh || c.mvd_arch.latent_dim == 0) {
    throw ShapeError("pipeline config: field encoders must start at " + std::to_string(mesh));
  }
  if (c.s2mpn_arch.dims.size() < 2 || c.s2mpn_arch.dims.front() != c.svb_arch.latent_dim ||
      c.s2mpn_arch.dims.back() != c.mvb_arch.latent_dim) {
    throw ShapeError("pipeline config: s2mpn dims do not bridge the svb and mvb latents");
  }
  if (c.m2mpn_arch.dims.size() < 2 || c.m2mpn_arch.dims.front() != c.mvb_arch.latent_dim ||
      c.m2mpn_arch.dims.back() != c.mvd_arch.latent_dim) {
    throw ShapeError("pipeline config: m2mpn dims do not bridge the mvb and mvd latents");
  }
}

// Observer for stage-level training progress, called with a short note as
// each network starts and finishes.
using StageHook = std::function<void(const std::string&)>;

// Trains the three autoencoders on the 80% train slice, then the projection
// nets on pairs of encoder means from that same slice. Deterministic given
// the config seeds; the 10/10 holdout slices are never touched.
inline PipelineModels train_pipeline(const std::vector<PairedSample>& samples,
                                     const PipelineConfig& cfg, const StageHook& note = {},
                                     const nn::EpochHook& on_epoch = {}) {
  validate(cfg);
  const DatasetSplit split = split_dataset(samples.size(), cfg.split_seed);
  const num::Matrix signals = pack_signals(samples, split.train);
  const num::Matrix bio = pack_fields(samples, split.train, SensorKind::biotac);
  const num::Matrix dig = pack_fields(samples, split.train, SensorKind::digit);

  const auto say = [&note](const std::string& msg) {
    if (note) note(msg);
  };

  PipelineModels m;
  say("training svb on " + std::to_string(signals.cols()) + " signals");
  m.svb = nn::train_network(cfg.svb_arch, signals, cfg.svb_hyper, on_epoch).model;

  // The field autoencoders see the train slice plus its grid mirrors; the
  // projection nets below encode the unaugmented columns only.
  say("training mvb on " + std::to_string(bio.cols() * 4) + " fields");
  m.mvb = nn::train_network(cfg.mvb_arch, augment_with_mirrors(bio), cfg.mvb_hyper, on_epoch).model;
  say("training mvd on " + std::to_string(dig.cols() * 4) + " fields");
  m.mvd = nn::train_network(cfg.mvd_arch, augment_with_mirrors(dig), cfg.mvd_hyper, on_epoch).model;

  say("training s2mpn on encoder means");
  const num::Matrix z_sig = nn::vae_encode_mean(m.svb, signals);
  const num::Matrix z_bio = nn::vae_encode_mean(m.mvb, bio);
  m.s2mpn = nn::train_network(cfg.s2mpn_arch, z_sig, z_bio, cfg.s2mpn_hyper, on_epoch).model;

  say("training m2mpn on encoder means");
  const num::Matrix z_dig = nn::vae_encode_mean(m.mvd, dig);
  m.m2mpn = nn::train_network(cfg.m2mpn_arch, z_bio, z_dig, cfg.m2mpn_hyper, on_epoch).model;

  validate(m);
  return m;
}

namespace detail {

inline num::Matrix signal_column(const ElectrodeFrame& s) {
  num::Matrix x(kElectrodeCount, 1);
  for (std::size_t d = 0; d < kElectrodeCount; ++d) x(d, 0) = s[d];
  return x;
}

inline num::Matrix field_column(const DeformationField& f) {
  constexpr std::size_t mesh = kFieldGrid * kFieldGrid;
  num::Matrix x(mesh, 1);
  for (std::size_t d = 0; d < mesh; ++d) x(d, 0) = f.values.data()[d];
  return x;
}

// Decoder outputs can dip slightly negative; predicted deformations are
// clamped at zero.
inline DeformationField field_from_column(const num::Matrix& col, SensorKind kind) {
  DeformationField f{kind, num::Matrix(kFieldGrid, kFieldGrid)};
  for (std::size_t d = 0; d < f.values.size(); ++d) {
    f.values.data()[d] = std::max(0.0, col(d, 0));
  }
  return f;
}

inline double plane_distance(geom::PlanePoint a, geom::PlanePoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace detail

// Step I: decode the projected signal latent into a BioTac deformation
// field. Inference uses encoder means only, so equal signals give equal
// fields.
inline DeformationField signal_to_biotac_field(const PipelineModels& m,
                                               const ElectrodeFrame& signal) {
  const num::Matrix mu = nn::vae_encode_mean(m.svb, detail::signal_column(signal));
  const num::Matrix z = nn::mlp_output(nn::mlp_forward(m.s2mpn, mu));
  return detail::field_from_column(nn::vae_decode(m.mvb, z), SensorKind::biotac);
}

// Step II: re-encode the BioTac field to its latent mean, project, decode as
// a DIGIT field. Accepts any BioTac field, not just Step I outputs.
inline DeformationField biotac_field_to_digit_field(const PipelineModels& m,
                                                    const DeformationField& field) {
  require_kind(field, SensorKind::biotac, "biotac_field_to_digit_field");
  const num::Matrix mu = nn::vae_encode_mean(m.mvb, detail::field_column(field));
  const num::Matrix z = nn::mlp_output(nn::mlp_forward(m.m2mpn, mu));
  return detail::field_from_column(nn::vae_decode(m.mvd, z), SensorKind::digit);
}

// Latent-only variant of the two steps: feeds the s2mpn output straight into
// m2mpn, skipping the decode and re-encode through the BioTac field.
inline DeformationField signal_to_digit_field_direct(const PipelineModels& m,
                                                     const ElectrodeFrame& signal) {
  const num::Matrix mu = nn::vae_encode_mean(m.svb, detail::signal_column(signal));
  const num::Matrix zb = nn::mlp_output(nn::mlp_forward(m.s2mpn, mu));
  const num::Matrix zd = nn::mlp_output(nn::mlp_forward(m.m2mpn, zb));
  return detail::field_from_column(nn::vae_decode(m.mvd, zd), SensorKind::digit);
}

struct ConvertResult {
  DeformationField biotac_field;
  DeformationField digit_field;
  geom::HeightMap height_map;  // smoothed, the direct render input
  render::TactileImage image;
};

// Full chain: signal -> BioTac field -> DIGIT field -> height map -> image.
// The default path is the exact composition of the two stage functions
// above; direct_latent routes through the latent-only variant instead.
inline ConvertResult convert(const PipelineModels& m, const render::CalibrationTable& calib,
                             const ElectrodeFrame& signal,
                             double smooth_sigma = geom::kDefaultSmoothSigma,
                             bool direct_latent = false) {
  ConvertResult r;
  r.biotac_field = signal_to_biotac_field(m, signal);
  r.digit_field = direct_latent ? signal_to_digit_field_direct(m, signal)
                                : biotac_field_to_digit_field(m, r.biotac_field);
  const geom::HeightMap raw = geom::rasterize_heightmap(r.digit_field, geom::kDefaultPitch);
  r.height_map = geom::gaussian_smooth(raw, smooth_sigma);
  r.image = render::render_taxim(r.height_map, calib);
  return r;
}

// Deformation-weighted mean node position in the field's own plane frame:
// the development plane for BioTac fields, the pad frame for DIGIT fields.
// A field with no positive deformation has no centroid; the plane midpoint
// stands in so error metrics stay finite.
inline geom::PlanePoint field_centroid(const DeformationField& f) {
  static const SensorSurface bio = make_surface(SensorKind::biotac);
  static const SensorSurface dig = make_surface(SensorKind::digit);
  const SensorSurface& surf = f.kind == SensorKind::biotac ? bio : dig;
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double w = std::max(0.0, f.values.data()[i]);
    mass += w;
    mx += w * surf.plane[i].x;
    my += w * surf.plane[i].y;
  }
  if (mass <= 1e-12) {
    if (f.kind == SensorKind::biotac) return {0.0, geom::kBiotacLength / 2.0};
    return {geom::kPadWidth / 2.0, geom::kPadHeight / 2.0};
  }
  return {mx / mass, my / mass};
}

inline double field_max(const DeformationField& f) {
  double m = f.values.data()[0];
  for (std::size_t i = 1; i < f.values.size(); ++i) m = std::max(m, f.values.data()[i]);
  return m;
}

// Mean pixel position weighted by the summed per-channel deviation from the
// calibration background color, in pixel units with centers at px + 0.5. An
// exact background image has no deviation; the image center stands in.
inline geom::PlanePoint image_centroid_px(const render::TactileImage& img,
                                          const render::CalibrationTable& calib) {
  int bg[3];
  for (std::size_t c = 0; c < 3; ++c) bg[c] = render::detail::byte_clamp(calib.background[c]);
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t py = 0; py < img.height; ++py) {
    for (std::size_t px = 0; px < img.width; ++px) {
      double w = 0.0;
      for (std::size_t c = 0; c < 3; ++c) w += std::abs(int(img.at(px, py, c)) - bg[c]);
      mass += w;
      mx += w * (double(px) + 0.5);
      my += w * (double(py) + 0.5);
    }
  }
  if (mass <= 0.0) return {double(img.width) / 2.0, double(img.height) / 2.0};
  return {mx / mass, my / mass};
}

// Variance-weighted coefficient of determination over all entries, with one
// sample per column and each row's mean as the baseline. 1 is a perfect
// reconstruction; 0 matches predicting row means.
inline double r_squared(const num::Matrix& pred, const num::Matrix& truth) {
  if (!pred.same_shape(truth)) {
    throw ShapeError("r_squared: shapes differ, " + num::shape_str(pred) + " vs " +
                     num::shape_str(truth));
  }
  if (truth.cols() < 2) throw DomainError("r_squared: need at least 2 samples");
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < truth.cols(); ++c) mean += truth(r, c);
    mean /= double(truth.cols());
    for (std::size_t c = 0; c < truth.cols(); ++c) {
      const double res = pred(r, c) - truth(r, c);
      const double dev = truth(r, c) - mean;
      ss_res += res * res;
      ss_tot += dev * dev;
    }
  }
  if (!(ss_tot > 0.0)) throw DomainError("r_squared: target has no variance to explain");
  return 1.0 - ss_res / ss_tot;
}

inline constexpr double kCentroidPassMm = 1.5;  // field centroid error gate
inline constexpr double kDepthPassRel = 0.20;   // relative max-depth error gate
inline constexpr double kImagePassPx = 10.0;    // rendered centroid error gate

struct EvalSample {
  double centroid_error_mm = 0.0;
  double depth_rel_error = 0.0;
  double biotac_recon_mse = 0.0;  // predicted vs ground-truth BioTac field
  double digit_recon_mse = 0.0;   // predicted vs ground-truth DIGIT field
  double image_centroid_error_px = 0.0;
};

struct EvalReport {
  std::vector<EvalSample> samples;
  double mean_centroid_error_mm = 0.0;
  double median_centroid_error_mm = 0.0;
  double mean_depth_rel_error = 0.0;
  double median_depth_rel_error = 0.0;
  double mean_biotac_recon_mse = 0.0;
  double mean_digit_recon_mse = 0.0;
  double mean_image_centroid_error_px = 0.0;
  double centroid_pass_rate = 0.0;  // fraction within kCentroidPassMm
  double depth_pass_rate = 0.0;     // fraction within kDepthPassRel
  double image_pass_rate = 0.0;     // fraction within kImagePassPx
};

namespace detail {

inline double field_mse(const DeformationField& a, const DeformationField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values.data()[i] - b.values.data()[i];
    acc += d * d;
  }
  return acc / double(a.values.size());
}

inline double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / double(v.size());
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double rate_below(const std::vector<double>& v, double gate) {
  std::size_t hits = 0;
  for (double x : v) {
    if (x <= gate) ++hits;
  }
  return double(hits) / double(v.size());
}

}  // namespace detail

// Metrics for one prediction against its ground-truth sample. Feeding the
// ground-truth fields back in yields exact zeros everywhere.
inline EvalSample evaluate_sample(const DeformationField& pred_biotac,
                                  const DeformationField& pred_digit,
                                  const render::CalibrationTable& calib,
                                  const PairedSample& truth,
                                  double smooth_sigma = geom::kDefaultSmoothSigma) {
  require_kind(pred_biotac, SensorKind::biotac, "evaluate_sample");
  require_kind(pred_digit, SensorKind::digit, "evaluate_sample");
  EvalSample e;
  e.centroid_error_mm =
      detail::plane_distance(field_centroid(pred_digit), field_centroid(truth.digit_field));
  const double truth_max = field_max(truth.digit_field);
  e.depth_rel_error = std::abs(field_max(pred_digit) - truth_max) / std::max(truth_max, 1e-12);
  e.biotac_recon_mse = detail::field_mse(pred_biotac, truth.biotac_field);
  e.digit_recon_mse = detail::field_mse(pred_digit, truth.digit_field);
  const auto render_of = [&](const DeformationField& f) {
    const geom::HeightMap raw = geom::rasterize_heightmap(f, geom::kDefaultPitch);
    return render::render_taxim(geom::gaussian_smooth(raw, smooth_sigma), calib);
  };
  e.image_centroid_error_px = detail::plane_distance(
      image_centroid_px(render_of(pred_digit), calib),
      image_centroid_px(render_of(truth.digit_field), calib));
  return e;
}

// Runs the two-stage prediction over a held-out set and aggregates the
// per-sample metrics.
inline EvalReport evaluate(const PipelineModels& m, const render::CalibrationTable& calib,
                           const std::vector<PairedSample>& test_samples,
                           double smooth_sigma = geom::kDefaultSmoothSigma) {
  if (test_samples.empty()) throw DomainError("evaluate: empty test set");
  EvalReport r;
  r.samples.reserve(test_samples.size());
  std::vector<double> cent, depth, bio_mse, dig_mse, img;
  for (const PairedSample& s : test_samples) {
    const DeformationField pb = signal_to_biotac_field(m, s.signal);
    const DeformationField pd = biotac_field_to_digit_field(m, pb);
    const EvalSample e = evaluate_sample(pb, pd, calib, s, smooth_sigma);
    r.samples.push_back(e);
    cent.push_back(e.centroid_error_mm);
    depth.push_back(e.depth_rel_error);
    bio_mse.push_back(e.biotac_recon_mse);
    dig_mse.push_back(e.digit_recon_mse);
    img.push_back(e.image_centroid_error_px);
  }
  r.mean_centroid_error_mm = detail::mean_of(cent);
  r.median_centroid_error_mm = detail::median_of(cent);
  r.mean_depth_rel_error = detail::mean_of(depth);
  r.median_depth_rel_error = detail::median_of(depth);
  r.mean_biotac_recon_mse = detail::mean_of(bio_mse);
  r.mean_digit_recon_mse = detail::mean_of(dig_mse);
  r.mean_image_centroid_error_px = detail::mean_of(img);
  r.centroid_pass_rate = detail::rate_below(cent, kCentroidPassMm);
  r.depth_pass_rate = detail::rate_below(depth, kDepthPassRel);
  r.image_pass_rate = detail::rate_below(img, kImagePassPx);
  return r;
}

}  // namespace tactx::pipeline
