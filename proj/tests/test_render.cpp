#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tactx/prng.hpp"
#include "tactx/render.hpp"

using namespace tactx;
using namespace tactx::render;

namespace {

geom::NormalMap flat_normals() {
  geom::HeightMap h;
  return geom::height_to_normals(h);
}

double image_rmse(const TactileImage& a, const TactileImage& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = double(a.rgb[i]) - double(b.rgb[i]);
    acc += d * d;
  }
  return std::sqrt(acc / double(a.rgb.size()));
}

}  // namespace

TEST_CASE("shade_reference flat pad is spatially uniform") {
  TactileImage img = shade_reference(flat_normals(), default_light_rig());
  const std::uint8_t r0 = img.at(0, 0, 0), g0 = img.at(0, 0, 1), b0 = img.at(0, 0, 2);
  for (std::size_t py = 0; py < img.height; ++py) {
    for (std::size_t px = 0; px < img.width; ++px) {
      REQUIRE(img.at(px, py, 0) == r0);
      REQUIRE(img.at(px, py, 1) == g0);
      REQUIRE(img.at(px, py, 2) == b0);
    }
  }
  // All three lights see the flat pad at n.d = sqrt(3)/2.
  const double lambert = std::sqrt(3.0) / 2.0;
  const LightRig& rig = default_light_rig();
  double want_r = rig.ambient[0];
  for (const Light& l : rig.lights) want_r += l.color[0] * lambert;
  CHECK(long(r0) == std::lround(255.0 * want_r));
}

TEST_CASE("shade_reference dark rig gives a black image") {
  LightRig rig = default_light_rig();
  rig.ambient = {0.0, 0.0, 0.0};
  for (Light& l : rig.lights) l.color = {0.0, 0.0, 0.0};
  TactileImage img = shade_reference(flat_normals(), rig);
  for (std::uint8_t v : img.rgb) REQUIRE(v == 0);
}

TEST_CASE("shade_reference single overhead white light reads n_z") {
  LightRig rig;
  rig.ambient = {0.0, 0.0, 0.0};
  rig.lights[0] = {{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}};
  rig.lights[1] = {{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}};
  rig.lights[2] = {{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}};

  geom::HeightMap h;
  const double t = 0.4;
  for (std::size_t py = 0; py < h.height; ++py)
    for (std::size_t px = 0; px < h.width; ++px)
      h.at(px, py) = t * (double(px) + 0.5) * h.pitch;
  geom::NormalMap n = geom::height_to_normals(h);
  TactileImage img = shade_reference(n, rig);
  for (std::size_t py = 100; py < 103; ++py) {
    for (std::size_t px = 100; px < 103; ++px) {
      const double nz = n.nz[py * n.width + px];
      REQUIRE(long(img.at(px, py, 0)) == std::lround(255.0 * nz));
    }
  }
}

TEST_CASE("shade_reference rejects mismatched dims") {
  geom::NormalMap n;
  n.width = 10;
  n.height = 10;
  n.nx.assign(100, 0.0);
  n.ny.assign(100, 0.0);
  n.nz.assign(100, 1.0);
  CHECK_THROWS_AS(shade_reference(n, default_light_rig()), ShapeError);
}

TEST_CASE("default_light_rig directions are unit length") {
  for (const Light& l : default_light_rig().lights) {
    const double len =
        std::sqrt(l.dir[0] * l.dir[0] + l.dir[1] * l.dir[1] + l.dir[2] * l.dir[2]);
    REQUIRE(len == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("generate_calibration_set is bounded, finite, and deterministic") {
  auto samples = generate_calibration_set(default_light_rig());
  REQUIRE(samples.size() >= 6);
  REQUIRE(samples.size() <= kMaxCalibSamples);
  for (const CalibSample& s : samples) {
    REQUIRE(std::isfinite(s.gx));
    REQUIRE(std::isfinite(s.gy));
    REQUIRE(std::abs(s.gx) <= 10.0);
    REQUIRE(std::abs(s.gy) <= 10.0);
  }

  auto again = generate_calibration_set(default_light_rig());
  REQUIRE(samples.size() == again.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    REQUIRE(samples[i].gx == again[i].gx);
    REQUIRE(samples[i].gy == again[i].gy);
    REQUIRE(samples[i].rgb == again[i].rgb);
  }
}

TEST_CASE("generate_calibration_set flat regions carry the background color") {
  auto samples = generate_calibration_set(default_light_rig());
  TactileImage bg = shade_reference(flat_normals(), default_light_rig());
  bool saw_flat = false;
  for (const CalibSample& s : samples) {
    if (s.gx == 0.0 && s.gy == 0.0) {
      saw_flat = true;
      REQUIRE(s.rgb[0] == double(bg.at(0, 0, 0)));
      REQUIRE(s.rgb[1] == double(bg.at(0, 0, 1)));
      REQUIRE(s.rgb[2] == double(bg.at(0, 0, 2)));
    }
  }
  REQUIRE(saw_flat);
}

TEST_CASE("fit_calibration recovers a planted polynomial") {
  const std::array<std::array<double, 6>, 3> planted = {{
      {120.0, 30.0, -18.0, 5.5, 2.0, -3.25},
      {90.0, -12.0, 25.0, 1.5, -4.0, 2.75},
      {160.0, 8.0, 6.0, -2.0, 1.0, 0.5},
  }};
  num::Prng rng(404);
  std::vector<CalibSample> samples;
  for (int i = 0; i < 500; ++i) {
    CalibSample s;
    s.gx = rng.uniform(-1.5, 1.5);
    s.gy = rng.uniform(-1.5, 1.5);
    const double mono[6] = {1.0, s.gx, s.gy, s.gx * s.gx, s.gx * s.gy, s.gy * s.gy};
    for (std::size_t c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 6; ++k) acc += planted[c][k] * mono[k];
      s.rgb[c] = acc;
    }
    samples.push_back(s);
  }
  CalibrationTable table = fit_calibration(samples);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < 6; ++k) {
      REQUIRE(table.coeffs[c][k] == Catch::Approx(planted[c][k]).margin(1e-6));
    }
    REQUIRE(table.background[c] == table.coeffs[c][0]);
  }
}

TEST_CASE("fit_calibration constant color keeps only the constant term") {
  num::Prng rng(405);
  std::vector<CalibSample> samples;
  for (int i = 0; i < 100; ++i) {
    CalibSample s;
    s.gx = rng.uniform(-1.0, 1.0);
    s.gy = rng.uniform(-1.0, 1.0);
    s.rgb = {140.0, 150.0, 164.0};
    samples.push_back(s);
  }
  CalibrationTable table = fit_calibration(samples);
  for (std::size_t c = 0; c < 3; ++c) {
    REQUIRE(table.coeffs[c][0] == Catch::Approx(samples[0].rgb[c]).margin(1e-9));
    for (std::size_t k = 1; k < 6; ++k) {
      REQUIRE(std::abs(table.coeffs[c][k]) <= 1e-9);
    }
  }
}

TEST_CASE("fit_calibration needs at least six samples and full rank") {
  std::vector<CalibSample> five(5);
  CHECK_THROWS_AS(fit_calibration(five), DomainError);

  // All samples at one gradient point: design is rank 1.
  std::vector<CalibSample> degenerate(50);
  for (auto& s : degenerate) {
    s.gx = 0.5;
    s.gy = -0.25;
    s.rgb = {10.0, 20.0, 30.0};
  }
  CHECK_THROWS_AS(fit_calibration(degenerate), SingularSystemError);
}

TEST_CASE("fit_calibration residuals are orthogonal to the design") {
  auto samples = generate_calibration_set(default_light_rig());
  CalibrationTable table = fit_calibration(samples);
  for (std::size_t c = 0; c < 3; ++c) {
    double dot[6] = {};
    double norm_sq[6] = {};
    double resid_sq = 0.0;
    for (const CalibSample& s : samples) {
      const double mono[6] = {1.0, s.gx, s.gy, s.gx * s.gx, s.gx * s.gy, s.gy * s.gy};
      double fit = 0.0;
      for (std::size_t k = 0; k < 6; ++k) fit += table.coeffs[c][k] * mono[k];
      const double r = s.rgb[c] - fit;
      resid_sq += r * r;
      for (std::size_t k = 0; k < 6; ++k) {
        dot[k] += r * mono[k];
        norm_sq[k] += mono[k] * mono[k];
      }
    }
    for (std::size_t k = 0; k < 6; ++k) {
      const double scale = std::sqrt(norm_sq[k] * resid_sq);
      if (scale > 0.0) REQUIRE(std::abs(dot[k]) / scale <= 1e-8);
    }
  }
}

TEST_CASE("render_taxim zero height map is the uniform background") {
  auto samples = generate_calibration_set(default_light_rig());
  CalibrationTable table = fit_calibration(samples);
  geom::HeightMap flat;
  TactileImage img = render_taxim(flat, table);
  for (std::size_t py = 0; py < img.height; ++py) {
    for (std::size_t px = 0; px < img.width; ++px) {
      for (std::size_t c = 0; c < 3; ++c) {
        REQUIRE(long(img.at(px, py, c)) == std::lround(table.background[c]));
      }
    }
  }
}

TEST_CASE("render_taxim is byte-identical across repeated runs and thread counts") {
  auto samples = generate_calibration_set(default_light_rig());
  CalibrationTable table = fit_calibration(samples);
  ContactSpec spec{9.0, 7.5, 5.0, 4.0, 0.0};
  geom::HeightMap h = digit_contact_heightmap(spec);

  const unsigned saved = num::thread_count();
  num::set_thread_count(1);
  TactileImage a = render_taxim(h, table);
  num::set_thread_count(4);
  TactileImage b = render_taxim(h, table);
  num::set_thread_count(saved);
  REQUIRE(a.rgb == b.rgb);
}

TEST_CASE("render_taxim matches the oracle on calibration poses within 2 levels") {
  auto samples = generate_calibration_set(default_light_rig());
  CalibrationTable table = fit_calibration(samples);
  double worst = 0.0;
  for (const ContactSpec& spec : calibration_poses()) {
    geom::HeightMap h = digit_contact_heightmap(spec);
    TactileImage oracle = shade_reference(geom::height_to_normals(h), default_light_rig());
    TactileImage poly = render_taxim(h, table);
    worst = std::max(worst, image_rmse(oracle, poly));
  }
  INFO("worst calibration-pose RMSE = " << worst);
  CHECK(worst <= 2.0);
}

TEST_CASE("render_taxim matches the oracle on held-out poses within 4 levels") {
  auto samples = generate_calibration_set(default_light_rig());
  CalibrationTable table = fit_calibration(samples);
  // Off-grid positions, radii, and depths.
  const ContactSpec held_out[] = {
      {5.3, 4.1, 4.0, 3.0, 0.0},   {11.7, 9.9, 2.5, 5.0, 0.0},
      {8.2, 11.3, 3.0, 2.5, 0.0},  {14.6, 6.4, 4.5, 4.5, 0.0},
      {6.9, 8.8, 1.5, 6.0, 0.0},
  };
  double worst = 0.0;
  for (const ContactSpec& spec : held_out) {
    geom::HeightMap h = digit_contact_heightmap(spec);
    TactileImage oracle = shade_reference(geom::height_to_normals(h), default_light_rig());
    TactileImage poly = render_taxim(h, table);
    worst = std::max(worst, image_rmse(oracle, poly));
  }
  INFO("worst held-out RMSE = " << worst);
  CHECK(worst <= 4.0);
}
