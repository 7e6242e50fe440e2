#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "tactx/field.hpp"
#include "tactx/geometry.hpp"

namespace tactx {

// Rest geometry of a sensor's sensing area sampled on a 64x64 grid. `plane`
// holds each node's coordinates in the frame geodesic distances are measured
// in: the cylinder development for the BioTac, the pad rectangle for the
// DIGIT.
struct SensorSurface {
  SensorKind kind = SensorKind::biotac;
  std::vector<std::array<double, 3>> pos;     // mm
  std::vector<std::array<double, 3>> normal;  // unit, outward
  std::vector<geom::PlanePoint> plane;        // mm

  static std::size_t index(std::size_t r, std::size_t c) { return r * kFieldGrid + c; }
};

// BioTac: half-cylinder shell of radius 7 mm and length 20 mm, axis along y,
// crest toward +z, theta in [-pi/2, pi/2]. DIGIT: flat 20 x 16 mm pad in the
// z=0 plane. Grid rows sweep the axial/vertical coordinate, columns the
// circumferential/horizontal one, endpoints included.
inline SensorSurface make_surface(SensorKind kind) {
  SensorSurface s;
  s.kind = kind;
  const std::size_t n = kFieldGrid * kFieldGrid;
  s.pos.resize(n);
  s.normal.resize(n);
  s.plane.resize(n);
  const double steps = double(kFieldGrid - 1);
  for (std::size_t r = 0; r < kFieldGrid; ++r) {
    for (std::size_t c = 0; c < kFieldGrid; ++c) {
      const std::size_t i = SensorSurface::index(r, c);
      if (kind == SensorKind::biotac) {
        const double theta = (double(c) / steps - 0.5) * std::numbers::pi;
        const double u = geom::kBiotacLength * double(r) / steps;
        s.pos[i] = {geom::kBiotacRadius * std::sin(theta), u,
                    geom::kBiotacRadius * std::cos(theta)};
        s.normal[i] = {std::sin(theta), 0.0, std::cos(theta)};
        s.plane[i] = geom::unfold_biotac(theta, u);
      } else {
        const double x = geom::kPadWidth * double(c) / steps;
        const double y = geom::kPadHeight * double(r) / steps;
        s.pos[i] = {x, y, 0.0};
        s.normal[i] = {0.0, 0.0, 1.0};
        s.plane[i] = {x, y};
      }
    }
  }
  return s;
}

}  // namespace tactx
