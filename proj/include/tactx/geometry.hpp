#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/field.hpp"
#include "tactx/matrix.hpp"
#include "tactx/parallel.hpp"

namespace tactx::geom {

inline constexpr double kBiotacRadius = 7.0;   // mm
inline constexpr double kBiotacLength = 20.0;  // mm, axial extent
inline constexpr double kPadWidth = 20.0;      // mm, DIGIT x extent
inline constexpr double kPadHeight = 16.0;     // mm, DIGIT y extent

// Half-width of the unfolded BioTac rectangle: r * pi/2.
inline constexpr double kUnfoldHalfWidth = kBiotacRadius * std::numbers::pi / 2.0;

struct PlanePoint {
  double x = 0.0;  // mm
  double y = 0.0;  // mm
};

// Cylinder development: arc length along the circumference, identity along
// the axis. Exact isometry for the half-cylinder shell.
inline PlanePoint unfold_biotac(double theta, double u) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr double tol = 1e-9;
  if (!(theta >= -half_pi - tol && theta <= half_pi + tol)) {
    throw DomainError("unfold_biotac: theta outside [-pi/2, pi/2]");
  }
  if (!(u >= -tol && u <= kBiotacLength + tol)) {
    throw DomainError("unfold_biotac: u outside [0, 20] mm");
  }
  return {kBiotacRadius * theta, u};
}

// Affine fit of the unfolded BioTac rectangle [-7pi/2, 7pi/2] x [0, 20] onto
// the DIGIT pad [0, 20] x [0, 16].
inline PlanePoint map_unfolded_to_digit(PlanePoint p) {
  constexpr double tol = 1e-9;
  if (!(p.x >= -kUnfoldHalfWidth - tol && p.x <= kUnfoldHalfWidth + tol &&
        p.y >= -tol && p.y <= kBiotacLength + tol)) {
    throw DomainError("map_unfolded_to_digit: point outside unfolded rectangle");
  }
  return {(p.x + kUnfoldHalfWidth) * (kPadWidth / (2.0 * kUnfoldHalfWidth)),
          p.y * (kPadHeight / kBiotacLength)};
}

inline PlanePoint map_digit_to_unfolded(PlanePoint p) {
  constexpr double tol = 1e-9;
  if (!(p.x >= -tol && p.x <= kPadWidth + tol && p.y >= -tol && p.y <= kPadHeight + tol)) {
    throw DomainError("map_digit_to_unfolded: point outside pad");
  }
  return {p.x * (2.0 * kUnfoldHalfWidth / kPadWidth) - kUnfoldHalfWidth,
          p.y * (kBiotacLength / kPadHeight)};
}

inline constexpr std::size_t kImageWidth = 240;   // px, spans the pad x extent
inline constexpr std::size_t kImageHeight = 320;  // px
inline constexpr double kDefaultPitch = kPadWidth / double(kImageWidth);  // mm/px
inline constexpr double kDefaultSmoothSigma = 2.0;  // px

// Per-pixel gel indentation depth (mm, >= 0). Pixel (px, py) is centered at
// ((px+1/2)*pitch, (py+1/2)*pitch) in pad coordinates; rows beyond the pad's
// 16 mm extent stay zero.
struct HeightMap {
  std::size_t width = kImageWidth;
  std::size_t height = kImageHeight;
  double pitch = kDefaultPitch;  // mm/px
  std::vector<double> values = std::vector<double>(kImageWidth * kImageHeight, 0.0);

  double& at(std::size_t px, std::size_t py) { return values[py * width + px]; }
  double at(std::size_t px, std::size_t py) const { return values[py * width + px]; }
};

// Bilinear resampling of a DIGIT deformation field onto the image grid.
// Field node (r, c) sits at pad position (c*W/63, r*H/63); pixels whose
// centers fall outside the pad rectangle are left at zero.
inline HeightMap rasterize_heightmap(const DeformationField& field, double pitch) {
  require_kind(field, SensorKind::digit, "rasterize_heightmap");
  if (!(pitch > 0.0)) throw DomainError("rasterize_heightmap: pitch must be > 0");

  HeightMap h;
  h.pitch = pitch;
  const double sx = double(kFieldGrid - 1) / kPadWidth;   // field cols per mm
  const double sy = double(kFieldGrid - 1) / kPadHeight;  // field rows per mm
  num::parallel_ranges(h.height, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t py = y0; py < y1; ++py) {
      const double vy = (double(py) + 0.5) * pitch;
      if (vy > kPadHeight) continue;
      const double fr = vy * sy;
      const std::size_t r0 = std::min(std::size_t(fr), kFieldGrid - 2);
      const double ty = fr - double(r0);
      for (std::size_t px = 0; px < h.width; ++px) {
        const double vx = (double(px) + 0.5) * pitch;
        if (vx > kPadWidth) continue;
        const double fc = vx * sx;
        const std::size_t c0 = std::min(std::size_t(fc), kFieldGrid - 2);
        const double tx = fc - double(c0);
        const double v00 = field.values(r0, c0), v01 = field.values(r0, c0 + 1);
        const double v10 = field.values(r0 + 1, c0), v11 = field.values(r0 + 1, c0 + 1);
        h.at(px, py) = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) +
                       ty * ((1.0 - tx) * v10 + tx * v11);
      }
    }
  });
  return h;
}

namespace detail {
// Normalized 1-D Gaussian taps for |i| <= 3*sigma.
inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = int(std::floor(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-double(i) * double(i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}
}  // namespace detail

// Separable Gaussian blur with replicate-edge padding. sigma_px = 0 is the
// identity.
inline HeightMap gaussian_smooth(const HeightMap& h, double sigma_px) {
  if (!(sigma_px >= 0.0)) throw DomainError("gaussian_smooth: sigma must be >= 0");
  if (sigma_px == 0.0) return h;
  const std::vector<double> kernel = detail::gaussian_kernel(sigma_px);
  const int radius = int(kernel.size() / 2);
  if (radius == 0) return h;

  const auto w = std::ptrdiff_t(h.width), ht = std::ptrdiff_t(h.height);
  HeightMap tmp = h;
  num::parallel_ranges(h.height, [&](std::size_t y0, std::size_t y1) {
    for (std::ptrdiff_t py = std::ptrdiff_t(y0); py < std::ptrdiff_t(y1); ++py) {
      for (std::ptrdiff_t px = 0; px < w; ++px) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const std::ptrdiff_t sx = std::clamp(px + i, std::ptrdiff_t{0}, w - 1);
          acc += kernel[std::size_t(i + radius)] * h.values[std::size_t(py * w + sx)];
        }
        tmp.values[std::size_t(py * w + px)] = acc;
      }
    }
  });
  HeightMap out = tmp;
  num::parallel_ranges(h.height, [&](std::size_t y0, std::size_t y1) {
    for (std::ptrdiff_t py = std::ptrdiff_t(y0); py < std::ptrdiff_t(y1); ++py) {
      for (std::ptrdiff_t px = 0; px < w; ++px) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const std::ptrdiff_t sy = std::clamp(py + i, std::ptrdiff_t{0}, ht - 1);
          acc += kernel[std::size_t(i + radius)] * tmp.values[std::size_t(sy * w + px)];
        }
        out.values[std::size_t(py * w + px)] = acc;
      }
    }
  });
  return out;
}

// dh/dx and dh/dy in mm/mm, central differences inside, one-sided at the
// borders.
struct GradientMaps {
  std::size_t width = 0, height = 0;
  std::vector<double> gx, gy;
};

inline GradientMaps height_gradients(const HeightMap& h) {
  GradientMaps g;
  g.width = h.width;
  g.height = h.height;
  g.gx.assign(h.width * h.height, 0.0);
  g.gy.assign(h.width * h.height, 0.0);
  const std::size_t w = h.width, ht = h.height;
  num::parallel_ranges(ht, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t py = y0; py < y1; ++py) {
      for (std::size_t px = 0; px < w; ++px) {
        const std::size_t xl = px == 0 ? 0 : px - 1;
        const std::size_t xr = px == w - 1 ? w - 1 : px + 1;
        const std::size_t yl = py == 0 ? 0 : py - 1;
        const std::size_t yr = py == ht - 1 ? ht - 1 : py + 1;
        g.gx[py * w + px] = (h.at(xr, py) - h.at(xl, py)) / (double(xr - xl) * h.pitch);
        g.gy[py * w + px] = (h.at(px, yr) - h.at(px, yl)) / (double(yr - yl) * h.pitch);
      }
    }
  });
  return g;
}

// Unit normals of the deformed surface z = -h. The outward normal is
// proportional to (dh/dx, dh/dy, 1).
struct NormalMap {
  std::size_t width = 0, height = 0;
  std::vector<double> nx, ny, nz;
};

inline NormalMap height_to_normals(const HeightMap& h) {
  const GradientMaps g = height_gradients(h);
  NormalMap n;
  n.width = g.width;
  n.height = g.height;
  n.nx.assign(g.gx.size(), 0.0);
  n.ny.assign(g.gx.size(), 0.0);
  n.nz.assign(g.gx.size(), 1.0);
  for (std::size_t i = 0; i < g.gx.size(); ++i) {
    const double inv = 1.0 / std::sqrt(g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i] + 1.0);
    n.nx[i] = g.gx[i] * inv;
    n.ny[i] = g.gy[i] * inv;
    n.nz[i] = inv;
  }
  return n;
}

}  // namespace tactx::geom
