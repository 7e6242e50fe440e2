#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "tactx/field.hpp"
#include "tactx/pipeline.hpp"
#include "tactx/prng.hpp"
#include "tactx/render.hpp"

using namespace tactx;
using namespace tactx::pipeline;
using num::Matrix;
using num::Prng;

namespace {

// Smooth synthetic samples: a bump whose position and amplitude vary with
// the index, so tiny autoencoders see structured data.
PairedSample synthetic_sample(std::size_t i) {
  PairedSample s;
  s.spec = {4.0 + 0.5 * double(i % 8), 4.0 + 0.3 * double(i % 5), 1.0 + 0.2 * double(i % 4),
            3.0, 15.0 * double(i)};
  Prng rng(900 + i);
  for (auto& e : s.signal) e = -rng.uniform();
  s.biotac_field = {SensorKind::biotac, Matrix(kFieldGrid, kFieldGrid)};
  s.digit_field = {SensorKind::digit, Matrix(kFieldGrid, kFieldGrid)};
  const double cr = 20.0 + 2.0 * double(i % 6);
  const double cc = 28.0 + 2.0 * double(i % 4);
  const double amp = 0.05 + 0.01 * double(i % 5);
  for (std::size_t r = 0; r < kFieldGrid; ++r) {
    for (std::size_t c = 0; c < kFieldGrid; ++c) {
      const double d2 = (double(r) - cr) * (double(r) - cr) + (double(c) - cc) * (double(c) - cc);
      s.biotac_field.values(r, c) = amp * std::exp(-d2 / 60.0);
      s.digit_field.values(r, c) = amp * std::exp(-d2 / 40.0);
    }
  }
  return s;
}

std::vector<PairedSample> synthetic_dataset(std::size_t n) {
  std::vector<PairedSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(synthetic_sample(i));
  return out;
}

// Narrow networks keep the training-path tests fast; dims still honor the
// 19-electrode and 64x64 interfaces.
PipelineConfig tiny_config(std::uint64_t seed) {
  PipelineConfig c;
  c.split_seed = seed;
  c.svb_arch = {{kElectrodeCount, 8}, 2};
  c.mvb_arch = {{kFieldGrid * kFieldGrid, 8}, 2};
  c.mvd_arch = {{kFieldGrid * kFieldGrid, 8}, 2};
  c.s2mpn_arch = {{2, 4, 2}};
  c.m2mpn_arch = {{2, 4, 2}};
  c.svb_hyper.seed = seed + 1;
  c.mvb_hyper.seed = seed + 2;
  c.mvd_hyper.seed = seed + 3;
  c.s2mpn_hyper.seed = seed + 4;
  c.m2mpn_hyper.seed = seed + 5;
  c.svb_hyper.epochs = 2;
  c.mvb_hyper.epochs = 2;
  c.mvd_hyper.epochs = 2;
  c.s2mpn_hyper.epochs = 2;
  c.m2mpn_hyper.epochs = 2;
  return c;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_mlp(const nn::MlpModel& a, const nn::MlpModel& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].act != b.layers[i].act) return false;
    if (!same_matrix(a.layers[i].w, b.layers[i].w)) return false;
    if (!same_matrix(a.layers[i].b, b.layers[i].b)) return false;
  }
  return true;
}

bool same_vae(const nn::VaeModel& a, const nn::VaeModel& b) {
  return a.latent_dim == b.latent_dim && same_mlp(a.encoder_trunk, b.encoder_trunk) &&
         same_mlp(a.mu_head, b.mu_head) && same_mlp(a.logvar_head, b.logvar_head) &&
         same_mlp(a.decoder, b.decoder);
}

bool same_models(const PipelineModels& a, const PipelineModels& b) {
  return same_vae(a.svb, b.svb) && same_vae(a.mvb, b.mvb) && same_vae(a.mvd, b.mvd) &&
         same_mlp(a.s2mpn, b.s2mpn) && same_mlp(a.m2mpn, b.m2mpn);
}

bool same_field(const DeformationField& a, const DeformationField& b) {
  return a.kind == b.kind && same_matrix(a.values, b.values);
}

// Flat response: every pixel renders to the background color.
render::CalibrationTable flat_calibration() {
  render::CalibrationTable t;
  for (std::size_t c = 0; c < 3; ++c) {
    t.coeffs[c][0] = 40.0 + 10.0 * double(c);
    t.background[c] = t.coeffs[c][0];
  }
  return t;
}

}  // namespace

TEST_CASE("split_dataset partitions indices 80/10/10") {
  const DatasetSplit s = split_dataset(20, 3);
  REQUIRE(s.train.size() == 16);
  REQUIRE(s.val.size() == 2);
  REQUIRE(s.test.size() == 2);

  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.val.begin(), s.val.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) REQUIRE(all[i] == i);

  const DatasetSplit again = split_dataset(20, 3);
  REQUIRE(again.train == s.train);
  REQUIRE(again.val == s.val);
  REQUIRE(again.test == s.test);
  REQUIRE(split_dataset(20, 4).train != s.train);

  const DatasetSplit ten = split_dataset(10, 1);
  REQUIRE(ten.train.size() == 8);
  REQUIRE(ten.val.size() == 1);
  REQUIRE(ten.test.size() == 1);

  REQUIRE_THROWS_AS(split_dataset(9, 0), DomainError);
  REQUIRE_THROWS_AS(split_dataset(0, 0), DomainError);
}

TEST_CASE("pack_signals and pack_fields map samples to columns") {
  const auto data = synthetic_dataset(3);
  const Matrix sig = pack_signals(data, {2, 0});
  REQUIRE(sig.rows() == kElectrodeCount);
  REQUIRE(sig.cols() == 2);
  for (std::size_t d = 0; d < kElectrodeCount; ++d) {
    REQUIRE(sig(d, 0) == data[2].signal[d]);
    REQUIRE(sig(d, 1) == data[0].signal[d]);
  }

  const Matrix dig = pack_fields(data, {1}, SensorKind::digit);
  REQUIRE(dig.rows() == kFieldGrid * kFieldGrid);
  REQUIRE(dig.cols() == 1);
  REQUIRE(dig(SensorSurface::index(20, 28), 0) == data[1].digit_field.values(20, 28));

  auto bad = data;
  bad[0].biotac_field.kind = SensorKind::digit;
  REQUIRE_THROWS_AS(pack_fields(bad, {0}, SensorKind::biotac), SensorKindError);
}

TEST_CASE("net role names") {
  REQUIRE(std::string(to_string(NetRole::svb)) == "svb");
  REQUIRE(std::string(to_string(NetRole::mvb)) == "mvb");
  REQUIRE(std::string(to_string(NetRole::mvd)) == "mvd");
  REQUIRE(std::string(to_string(NetRole::s2mpn)) == "s2mpn");
  REQUIRE(std::string(to_string(NetRole::m2mpn)) == "m2mpn");
}

TEST_CASE("pipeline config validation catches broken latent chains") {
  REQUIRE_NOTHROW(validate(tiny_config(0)));
  REQUIRE_NOTHROW(validate(default_pipeline_config(7)));

  auto c = tiny_config(0);
  c.s2mpn_arch = {{3, 2}};
  REQUIRE_THROWS_AS(validate(c), ShapeError);

  c = tiny_config(0);
  c.m2mpn_arch = {{2, 4, 5}};
  REQUIRE_THROWS_AS(validate(c), ShapeError);

  c = tiny_config(0);
  c.mvb_arch.encoder_dims = {128, 8};
  REQUIRE_THROWS_AS(validate(c), ShapeError);

  c = tiny_config(0);
  c.svb_hyper.learning_rate = -1.0;
  REQUIRE_THROWS_AS(validate(c), DomainError);
}

TEST_CASE("pipeline model validation checks the composable chain") {
  const auto data = synthetic_dataset(12);
  auto cfg = tiny_config(5);
  cfg.svb_hyper.epochs = 0;
  cfg.mvb_hyper.epochs = 0;
  cfg.mvd_hyper.epochs = 0;
  cfg.s2mpn_hyper.epochs = 0;
  cfg.m2mpn_hyper.epochs = 0;
  PipelineModels m = train_pipeline(data, cfg);
  REQUIRE_NOTHROW(validate(m));
  REQUIRE(m.svb.latent_dim == 2);
  REQUIRE(m.s2mpn.input_dim() == 2);
  REQUIRE(m.m2mpn.output_dim() == 2);

  Prng rng(11);
  auto broken = m;
  broken.s2mpn = nn::init_mlp(nn::MlpArch{{2, 3}}, rng);
  REQUIRE_THROWS_AS(validate(broken), ShapeError);

  broken = m;
  broken.svb = nn::init_vae(nn::VaeArch{{18, 6}, 2}, rng);
  REQUIRE_THROWS_AS(validate(broken), ShapeError);
}

TEST_CASE("train_pipeline rejects datasets below ten samples") {
  REQUIRE_THROWS_AS(train_pipeline(synthetic_dataset(5), tiny_config(0)), DomainError);
  REQUIRE_THROWS_AS(train_pipeline({}, tiny_config(0)), DomainError);
}

TEST_CASE("train_pipeline is deterministic and never reads the holdout slices") {
  const auto data = synthetic_dataset(12);
  const auto cfg = tiny_config(9);
  const PipelineModels a = train_pipeline(data, cfg);
  const PipelineModels b = train_pipeline(data, cfg);
  REQUIRE(same_models(a, b));

  // Corrupting the validation and test samples must not leak into training.
  const DatasetSplit split = split_dataset(data.size(), cfg.split_seed);
  auto mutated = data;
  for (std::size_t i : split.val) mutated[i].signal.fill(1e6);
  for (std::size_t i : split.test) mutated[i].digit_field.values.fill(1e6);
  REQUIRE(same_models(a, train_pipeline(mutated, cfg)));

  auto touched = data;
  touched[split.train[0]].signal.fill(0.5);
  REQUIRE_FALSE(same_models(a, train_pipeline(touched, cfg)));
}

TEST_CASE("stage operations are deterministic, clamped, and correctly typed") {
  const auto data = synthetic_dataset(12);
  const PipelineModels m = train_pipeline(data, tiny_config(21));

  const DeformationField bio = signal_to_biotac_field(m, data[3].signal);
  REQUIRE(bio.kind == SensorKind::biotac);
  REQUIRE(same_field(bio, signal_to_biotac_field(m, data[3].signal)));
  for (std::size_t i = 0; i < bio.values.size(); ++i) REQUIRE(bio.values.data()[i] >= 0.0);

  const DeformationField dig = biotac_field_to_digit_field(m, bio);
  REQUIRE(dig.kind == SensorKind::digit);
  REQUIRE(same_field(dig, biotac_field_to_digit_field(m, bio)));
  for (std::size_t i = 0; i < dig.values.size(); ++i) REQUIRE(dig.values.data()[i] >= 0.0);

  const DeformationField direct = signal_to_digit_field_direct(m, data[3].signal);
  REQUIRE(direct.kind == SensorKind::digit);
  REQUIRE(same_field(direct, signal_to_digit_field_direct(m, data[3].signal)));

  REQUIRE_THROWS_AS(biotac_field_to_digit_field(m, dig), SensorKindError);
}

TEST_CASE("convert composes the stage operations bit-exactly") {
  const auto data = synthetic_dataset(12);
  const PipelineModels m = train_pipeline(data, tiny_config(33));
  const auto calib = flat_calibration();

  const ConvertResult r = convert(m, calib, data[5].signal);
  const DeformationField bio = signal_to_biotac_field(m, data[5].signal);
  const DeformationField dig = biotac_field_to_digit_field(m, bio);
  REQUIRE(same_field(r.biotac_field, bio));
  REQUIRE(same_field(r.digit_field, dig));

  const geom::HeightMap expect =
      geom::gaussian_smooth(geom::rasterize_heightmap(dig, geom::kDefaultPitch), 2.0);
  REQUIRE(r.height_map.values == expect.values);
  REQUIRE(r.image.rgb == render::render_taxim(expect, calib).rgb);

  const ConvertResult again = convert(m, calib, data[5].signal);
  REQUIRE(again.image.rgb == r.image.rgb);

  const ConvertResult direct = convert(m, calib, data[5].signal, 2.0, true);
  REQUIRE(same_field(direct.digit_field, signal_to_digit_field_direct(m, data[5].signal)));
  REQUIRE(same_field(direct.biotac_field, bio));
}

TEST_CASE("field centroid weights node positions by deformation") {
  DeformationField f{SensorKind::digit, Matrix(kFieldGrid, kFieldGrid)};
  f.values(21, 42) = 0.3;
  auto c = field_centroid(f);
  REQUIRE(c.x == Catch::Approx(20.0 * 42 / 63).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(16.0 * 21 / 63).margin(1e-12));

  f.values(21, 0) = 0.3;  // same row, column 0 at x = 0
  c = field_centroid(f);
  REQUIRE(c.x == Catch::Approx(10.0 * 42 / 63).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(16.0 * 21 / 63).margin(1e-12));

  // Negative values carry no weight.
  f.values(0, 0) = -5.0;
  auto c2 = field_centroid(f);
  REQUIRE(c2.x == Catch::Approx(c.x).margin(1e-12));
  REQUIRE(c2.y == Catch::Approx(c.y).margin(1e-12));

  DeformationField zero{SensorKind::digit, Matrix(kFieldGrid, kFieldGrid)};
  c = field_centroid(zero);
  REQUIRE(c.x == 10.0);
  REQUIRE(c.y == 8.0);

  DeformationField bio{SensorKind::biotac, Matrix(kFieldGrid, kFieldGrid)};
  bio.values(16, 16) = 1.0;
  c = field_centroid(bio);
  const double theta = (16.0 / 63.0 - 0.5) * std::numbers::pi;
  REQUIRE(c.x == Catch::Approx(7.0 * theta).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(20.0 * 16 / 63).margin(1e-12));

  DeformationField zbio{SensorKind::biotac, Matrix(kFieldGrid, kFieldGrid)};
  c = field_centroid(zbio);
  REQUIRE(c.x == 0.0);
  REQUIRE(c.y == 10.0);

  REQUIRE(field_max(f) == 0.3);
  REQUIRE(field_max(zero) == 0.0);
}

TEST_CASE("image centroid weights deviation from the background color") {
  const auto calib = flat_calibration();
  render::TactileImage img;
  for (std::size_t py = 0; py < img.height; ++py) {
    for (std::size_t px = 0; px < img.width; ++px) {
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(px, py, c) = std::uint8_t(40 + 10 * c);
      }
    }
  }
  auto c = image_centroid_px(img, calib);
  REQUIRE(c.x == 120.0);
  REQUIRE(c.y == 160.0);

  for (std::size_t py = 40; py < 43; ++py) {
    for (std::size_t px = 30; px < 33; ++px) {
      img.at(px, py, 0) = 200;
    }
  }
  c = image_centroid_px(img, calib);
  REQUIRE(c.x == Catch::Approx(31.5).margin(1e-12));
  REQUIRE(c.y == Catch::Approx(41.5).margin(1e-12));
}

TEST_CASE("r_squared agrees with its closed forms") {
  Matrix truth(2, 4);
  double vals[] = {1.0, 2.0, 3.0, 4.0, -1.0, 0.5, 2.0, -0.5};
  for (std::size_t i = 0; i < 8; ++i) truth.data()[i] = vals[i];

  REQUIRE(r_squared(truth, truth) == 1.0);

  // Predicting each row's mean scores exactly zero.
  Matrix rowmean(2, 4);
  for (std::size_t r = 0; r < 2; ++r) {
    double m = 0.0;
    for (std::size_t c = 0; c < 4; ++c) m += truth(r, c);
    m /= 4.0;
    for (std::size_t c = 0; c < 4; ++c) rowmean(r, c) = m;
  }
  REQUIRE(r_squared(rowmean, truth) == Catch::Approx(0.0).margin(1e-15));

  Matrix constant(2, 4);
  constant.fill(3.0);
  REQUIRE_THROWS_AS(r_squared(truth, constant), DomainError);
  REQUIRE_THROWS_AS(r_squared(truth, Matrix(3, 4)), ShapeError);
  REQUIRE_THROWS_AS(r_squared(Matrix(2, 1), Matrix(2, 1)), DomainError);
}

TEST_CASE("evaluate_sample is exactly zero for a perfect prediction") {
  const auto data = synthetic_dataset(3);
  const auto calib = flat_calibration();
  const EvalSample e =
      evaluate_sample(data[1].biotac_field, data[1].digit_field, calib, data[1]);
  REQUIRE(e.centroid_error_mm == 0.0);
  REQUIRE(e.depth_rel_error == 0.0);
  REQUIRE(e.biotac_recon_mse == 0.0);
  REQUIRE(e.digit_recon_mse == 0.0);
  REQUIRE(e.image_centroid_error_px == 0.0);
}

TEST_CASE("evaluate aggregates finite non-negative metrics") {
  const auto data = synthetic_dataset(12);
  const PipelineModels m = train_pipeline(data, tiny_config(44));
  const auto calib = flat_calibration();

  std::vector<PairedSample> test(data.begin(), data.begin() + 4);
  const EvalReport r = evaluate(m, calib, test);
  REQUIRE(r.samples.size() == 4);
  for (const EvalSample& e : r.samples) {
    REQUIRE(std::isfinite(e.centroid_error_mm));
    REQUIRE(e.centroid_error_mm >= 0.0);
    REQUIRE(std::isfinite(e.depth_rel_error));
    REQUIRE(e.depth_rel_error >= 0.0);
    REQUIRE(std::isfinite(e.biotac_recon_mse));
    REQUIRE(e.biotac_recon_mse >= 0.0);
    REQUIRE(std::isfinite(e.digit_recon_mse));
    REQUIRE(e.digit_recon_mse >= 0.0);
    REQUIRE(std::isfinite(e.image_centroid_error_px));
    REQUIRE(e.image_centroid_error_px >= 0.0);
  }
  REQUIRE(std::isfinite(r.mean_centroid_error_mm));
  REQUIRE(std::isfinite(r.median_centroid_error_mm));
  REQUIRE(std::isfinite(r.mean_depth_rel_error));
  REQUIRE(std::isfinite(r.median_depth_rel_error));
  REQUIRE(std::isfinite(r.mean_biotac_recon_mse));
  REQUIRE(std::isfinite(r.mean_digit_recon_mse));
  REQUIRE(r.centroid_pass_rate >= 0.0);
  REQUIRE(r.centroid_pass_rate <= 1.0);
  REQUIRE(r.depth_pass_rate >= 0.0);
  REQUIRE(r.depth_pass_rate <= 1.0);
  REQUIRE(r.image_pass_rate >= 0.0);
  REQUIRE(r.image_pass_rate <= 1.0);

  REQUIRE_THROWS_AS(evaluate(m, calib, {}), DomainError);
}
