#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tactx/contact.hpp"
#include "tactx/errors.hpp"
#include "tactx/geometry.hpp"
#include "tactx/matrix.hpp"
#include "tactx/parallel.hpp"

namespace tactx::render {

struct TactileImage {
  std::size_t width = geom::kImageWidth;
  std::size_t height = geom::kImageHeight;
  std::vector<std::uint8_t> rgb =
      std::vector<std::uint8_t>(3 * geom::kImageWidth * geom::kImageHeight, 0);

  std::uint8_t& at(std::size_t px, std::size_t py, std::size_t c) {
    return rgb[3 * (py * width + px) + c];
  }
  std::uint8_t at(std::size_t px, std::size_t py, std::size_t c) const {
    return rgb[3 * (py * width + px) + c];
  }
};

struct Light {
  std::array<double, 3> dir;    // unit, toward the camera side
  std::array<double, 3> color;  // linear RGB weight
};

struct LightRig {
  std::array<Light, 3> lights;
  std::array<double, 3> ambient;
};

// Three directional lights at azimuths 0/120/240 degrees, elevation 60, one
// per color channel dominant, plus a dim ambient floor. Stands in for the
// DIGIT's internal illumination.
inline const LightRig& default_light_rig() {
  static const LightRig rig = [] {
    LightRig r;
    const std::array<std::array<double, 3>, 3> colors = {{
        {0.42, 0.06, 0.05},
        {0.05, 0.40, 0.07},
        {0.06, 0.08, 0.45},
    }};
    for (std::size_t l = 0; l < 3; ++l) {
      const double az = 2.0 * std::numbers::pi * double(l) / 3.0;
      // elevation 60 degrees: horizontal magnitude cos(60) = 1/2.
      r.lights[l].dir = {0.5 * std::cos(az), 0.5 * std::sin(az), std::sqrt(3.0) / 2.0};
      r.lights[l].color = colors[l];
    }
    r.ambient = {0.10, 0.12, 0.15};
    return r;
  }();
  return rig;
}

namespace detail {
inline std::uint8_t byte_clamp(double byte_value) {
  const long v = std::lround(byte_value);
  return std::uint8_t(std::clamp(v, 0L, 255L));
}
inline std::uint8_t to_byte(double intensity) { return byte_clamp(255.0 * intensity); }
}  // namespace detail

// Lambertian shading oracle: channel = ambient + sum over lights of
// color * max(0, n . d), scaled to bytes.
inline TactileImage shade_reference(const geom::NormalMap& normals, const LightRig& rig) {
  if (normals.width != geom::kImageWidth || normals.height != geom::kImageHeight) {
    throw ShapeError("shade_reference: normal map dims do not match the image");
  }
  TactileImage img;
  num::parallel_ranges(normals.height, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t py = y0; py < y1; ++py) {
      for (std::size_t px = 0; px < normals.width; ++px) {
        const std::size_t i = py * normals.width + px;
        for (std::size_t c = 0; c < 3; ++c) {
          double acc = rig.ambient[c];
          for (const Light& l : rig.lights) {
            const double lambert = normals.nx[i] * l.dir[0] + normals.ny[i] * l.dir[1] +
                                   normals.nz[i] * l.dir[2];
            if (lambert > 0.0) acc += l.color[c] * lambert;
          }
          img.at(px, py, c) = detail::to_byte(acc);
        }
      }
    }
  });
  return img;
}

// Smoothed DIGIT-pad height map for one contact: indent, rasterize, blur.
inline geom::HeightMap digit_contact_heightmap(
    const ContactSpec& spec, double sigma_px = geom::kDefaultSmoothSigma) {
  static const SensorSurface digit = make_surface(SensorKind::digit);
  const DeformationField field = indent_sphere(digit, spec);
  return geom::gaussian_smooth(geom::rasterize_heightmap(field, geom::kDefaultPitch),
                               sigma_px);
}

struct CalibSample {
  double gx = 0.0;
  double gy = 0.0;
  std::array<double, 3> rgb{};  // byte-scale values
};

// Sphere poses used for calibration: radius 4 mm pressed 1 mm deep on a 5x5
// grid across the pad interior.
inline std::vector<ContactSpec> calibration_poses() {
  std::vector<ContactSpec> poses;
  poses.reserve(25);
  for (std::size_t iu = 0; iu < 5; ++iu) {
    for (std::size_t iv = 0; iv < 5; ++iv) {
      ContactSpec spec;
      spec.u = 4.0 + 3.0 * double(iu);
      spec.v = 3.5 + 2.25 * double(iv);
      spec.force = kStiffness * 1.0;  // depth exactly 1 mm
      spec.indenter_radius = 4.0;
      spec.angle = 0.0;
      poses.push_back(spec);
    }
  }
  return poses;
}

inline constexpr std::size_t kMaxCalibSamples = 100000;

// Renders every calibration pose with the oracle and collects per-pixel
// (gradient, color) pairs, stride-subsampled in a fixed pose-major pixel
// order so the list never exceeds kMaxCalibSamples entries.
inline std::vector<CalibSample> generate_calibration_set(const LightRig& rig) {
  const std::vector<ContactSpec> poses = calibration_poses();
  const std::size_t per_image = geom::kImageWidth * geom::kImageHeight;
  const std::size_t total = poses.size() * per_image;
  const std::size_t stride = (total + kMaxCalibSamples - 1) / kMaxCalibSamples;

  std::vector<CalibSample> samples;
  samples.reserve(total / stride + 1);
  std::size_t global = 0;  // pixel counter across all poses
  for (const ContactSpec& spec : poses) {
    const geom::HeightMap h = digit_contact_heightmap(spec);
    const geom::GradientMaps g = height_gradients(h);
    const TactileImage img = shade_reference(geom::height_to_normals(h), rig);
    for (std::size_t i = 0; i < per_image; ++i, ++global) {
      if (global % stride != 0) continue;
      CalibSample s;
      s.gx = g.gx[i];
      s.gy = g.gy[i];
      const std::size_t px = i % geom::kImageWidth;
      const std::size_t py = i / geom::kImageWidth;
      for (std::size_t c = 0; c < 3; ++c) s.rgb[c] = double(img.at(px, py, c));
      samples.push_back(s);
    }
  }
  return samples;
}

// Per-channel quadratic response in the height gradients.
struct CalibrationTable {
  // Coefficient order: 1, gx, gy, gx^2, gx*gy, gy^2.
  std::array<std::array<double, 6>, 3> coeffs{};
  std::array<double, 3> background{};
};

inline CalibrationTable fit_calibration(const std::vector<CalibSample>& samples) {
  if (samples.size() < 6) {
    throw DomainError("fit_calibration: need at least 6 samples");
  }
  num::Matrix design(samples.size(), 6);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double gx = samples[i].gx, gy = samples[i].gy;
    design(i, 0) = 1.0;
    design(i, 1) = gx;
    design(i, 2) = gy;
    design(i, 3) = gx * gx;
    design(i, 4) = gx * gy;
    design(i, 5) = gy * gy;
  }
  CalibrationTable table;
  for (std::size_t c = 0; c < 3; ++c) {
    num::Matrix y(samples.size(), 1);
    for (std::size_t i = 0; i < samples.size(); ++i) y(i, 0) = samples[i].rgb[c];
    const num::Matrix beta = num::least_squares(design, y);
    for (std::size_t k = 0; k < 6; ++k) table.coeffs[c][k] = beta(k, 0);
    table.background[c] = table.coeffs[c][0];  // polynomial at (gx, gy) = (0, 0)
  }
  return table;
}

// Polynomial lookup renderer: same gradient stage as the oracle's normals,
// then the fitted per-channel response, with the oracle's rounding.
inline TactileImage render_taxim(const geom::HeightMap& h, const CalibrationTable& calib) {
  if (h.width != geom::kImageWidth || h.height != geom::kImageHeight) {
    throw ShapeError("render_taxim: height map dims do not match the image");
  }
  const geom::GradientMaps g = height_gradients(h);
  TactileImage img;
  num::parallel_ranges(h.height, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t py = y0; py < y1; ++py) {
      for (std::size_t px = 0; px < h.width; ++px) {
        const std::size_t i = py * h.width + px;
        const double gx = g.gx[i], gy = g.gy[i];
        const double mono[6] = {1.0, gx, gy, gx * gx, gx * gy, gy * gy};
        for (std::size_t c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (std::size_t k = 0; k < 6; ++k) acc += calib.coeffs[c][k] * mono[k];
          img.at(px, py, c) = detail::byte_clamp(acc);
        }
      }
    }
  });
  return img;
}

}  // namespace tactx::render
