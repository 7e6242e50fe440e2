#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tactx/errors.hpp"
#include "tactx/field.hpp"
#include "tactx/geometry.hpp"
#include "tactx/parallel.hpp"
#include "tactx/prng.hpp"
#include "tactx/surface.hpp"

namespace tactx {

inline constexpr double kStiffness = 5.0;    // N/mm, force -> depth
inline constexpr double kSkirtLambda = 1.0;  // mm, decay length outside contact
inline constexpr double kElectrodeSigma = 2.5;  // mm, sensing window
inline constexpr double kElectrodeGain = 1.0;

// Rigid-sphere indentation. The sphere of radius R is pressed to depth
// d = F/k at the contact center; inside the contact disc of radius
// a = sqrt(R*d) the displacement is the sphere's penetration of the rest
// surface, outside it decays as an exponential skirt from the rim value.
// Distances are geodesic: Euclidean in the surface's development plane.
inline DeformationField indent_sphere(const SensorSurface& surface,
                                      const ContactSpec& spec) {
  validate(spec);
  if (!(spec.u >= 0.0 && spec.u <= geom::kPadWidth && spec.v >= 0.0 &&
        spec.v <= geom::kPadHeight)) {
    throw DomainError("indent_sphere: contact center outside active area");
  }

  DeformationField field;
  field.kind = surface.kind;
  const double d = spec.force / kStiffness;
  if (d == 0.0) return field;

  const double radius = spec.indenter_radius;
  const double depth = std::min(d, radius);  // sphere cannot sink past its center
  const double a = std::sqrt(radius * depth);
  const double w_edge = std::sqrt(radius * radius - a * a) - (radius - depth);

  geom::PlanePoint center{spec.u, spec.v};
  if (surface.kind == SensorKind::biotac) center = geom::map_digit_to_unfolded(center);

  num::parallel_ranges(kFieldGrid, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      for (std::size_t c = 0; c < kFieldGrid; ++c) {
        const geom::PlanePoint p = surface.plane[SensorSurface::index(r, c)];
        const double rho = std::hypot(p.x - center.x, p.y - center.y);
        double w;
        if (rho <= a) {
          w = std::sqrt(radius * radius - rho * rho) - (radius - depth);
        } else {
          w = w_edge * std::exp(-(rho - a) / kSkirtLambda);
        }
        field.values(r, c) = std::max(w, 0.0);
      }
    }
  });
  return field;
}

// Fixed synthetic sensing sites in the unfolded BioTac frame: four staggered
// rows (4-5-5-5 sites) at 4.5 mm pitch, each row centered on x = 0.
inline const std::array<geom::PlanePoint, kElectrodeCount>& electrode_layout() {
  static const std::array<geom::PlanePoint, kElectrodeCount> sites = [] {
    std::array<geom::PlanePoint, kElectrodeCount> a{};
    std::size_t i = 0;
    const double row_y[4] = {4.0, 8.0, 12.0, 16.0};
    const std::size_t row_n[4] = {4, 5, 5, 5};
    for (std::size_t row = 0; row < 4; ++row) {
      const double x0 = -4.5 * (double(row_n[row]) - 1.0) / 2.0;
      for (std::size_t j = 0; j < row_n[row]; ++j) {
        a[i++] = {x0 + 4.5 * double(j), row_y[row]};
      }
    }
    return a;
  }();
  return sites;
}

// e_i = -g * sum_vertices w_i(vertex) * displacement, with w_i an
// unnormalized Gaussian window around site i in the unfolded frame.
inline ElectrodeFrame electrode_signals(
    const DeformationField& field,
    const std::array<geom::PlanePoint, kElectrodeCount>& layout = electrode_layout()) {
  require_kind(field, SensorKind::biotac, "electrode_signals");
  static const SensorSurface surface = make_surface(SensorKind::biotac);

  ElectrodeFrame out{};
  const double inv_two_sigma_sq = 1.0 / (2.0 * kElectrodeSigma * kElectrodeSigma);
  for (std::size_t e = 0; e < kElectrodeCount; ++e) {
    double acc = 0.0;
    for (std::size_t r = 0; r < kFieldGrid; ++r) {
      for (std::size_t c = 0; c < kFieldGrid; ++c) {
        const geom::PlanePoint p = surface.plane[SensorSurface::index(r, c)];
        const double dx = p.x - layout[e].x;
        const double dy = p.y - layout[e].y;
        const double w = std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
        acc += w * field.values(r, c);
      }
    }
    out[e] = -kElectrodeGain * acc;
  }
  return out;
}

// Uniform sampling bounds for ContactSpec draws. (u, v) are in the shared
// pad frame; defaults keep the contact disc away from the pad border.
struct SampleRanges {
  double u_min = 3.0, u_max = 17.0;        // mm
  double v_min = 3.0, v_max = 13.0;        // mm
  double force_min = 0.5, force_max = 5.0; // N
  double radius_min = 2.0, radius_max = 6.0;  // mm
  double angle_min = 0.0, angle_max = 360.0;  // degrees
};

inline void validate(const SampleRanges& r) {
  auto ordered = [](double lo, double hi) { return lo <= hi; };
  if (!ordered(r.u_min, r.u_max) || !ordered(r.v_min, r.v_max) ||
      !ordered(r.force_min, r.force_max) || !ordered(r.radius_min, r.radius_max) ||
      !ordered(r.angle_min, r.angle_max)) {
    throw DomainError("SampleRanges: min exceeds max");
  }
  if (!(r.u_min >= 0.0 && r.u_max <= geom::kPadWidth && r.v_min >= 0.0 &&
        r.v_max <= geom::kPadHeight)) {
    throw DomainError("SampleRanges: contact centers outside active area");
  }
  if (!(r.force_min >= 0.0)) throw DomainError("SampleRanges: negative force");
  if (!(r.radius_min > 0.0)) throw DomainError("SampleRanges: nonpositive radius");
}

// One spec from the sample's own PRNG substream; draws happen in a fixed
// order so a sample can be regenerated from (seed, index) alone.
inline ContactSpec draw_spec(std::uint64_t seed, std::uint64_t index,
                             const SampleRanges& r) {
  num::Prng rng(seed + index);
  ContactSpec s;
  s.u = rng.uniform(r.u_min, r.u_max);
  s.v = rng.uniform(r.v_min, r.v_max);
  s.force = rng.uniform(r.force_min, r.force_max);
  s.indenter_radius = rng.uniform(r.radius_min, r.radius_max);
  s.angle = rng.uniform(r.angle_min, r.angle_max);
  return s;
}

inline std::vector<PairedSample> generate_paired_dataset(
    std::size_t n, std::uint64_t seed, const SampleRanges& ranges = SampleRanges{}) {
  if (n < 1) throw DomainError("generate_paired_dataset: n must be >= 1");
  validate(ranges);

  const SensorSurface biotac = make_surface(SensorKind::biotac);
  const SensorSurface digit = make_surface(SensorKind::digit);

  std::vector<PairedSample> out(n);
  num::parallel_ranges(n, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      PairedSample& ps = out[i];
      ps.spec = draw_spec(seed, i, ranges);
      ps.biotac_field = indent_sphere(biotac, ps.spec);
      ps.digit_field = indent_sphere(digit, ps.spec);
      ps.signal = electrode_signals(ps.biotac_field);
    }
  });
  return out;
}

}  // namespace tactx
