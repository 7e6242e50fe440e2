#pragma once

#include <array>
#include <cmath>
#include <string>

#include "tactx/errors.hpp"
#include "tactx/matrix.hpp"

namespace tactx {

inline constexpr std::size_t kFieldGrid = 64;
inline constexpr std::size_t kElectrodeCount = 19;

enum class SensorKind : std::uint8_t { biotac = 0, digit = 1 };

inline const char* to_string(SensorKind k) {
  return k == SensorKind::biotac ? "biotac" : "digit";
}

// Scalar normal displacements (mm, into the sensor) sampled on the sensor's
// 64x64 surface grid. Row index = axial/vertical coordinate, column index =
// circumferential/horizontal coordinate.
struct DeformationField {
  SensorKind kind = SensorKind::biotac;
  num::Matrix values{kFieldGrid, kFieldGrid};
};

inline void require_kind(const DeformationField& f, SensorKind want,
                         const std::string& where) {
  if (f.kind != want) {
    throw SensorKindError(where + ": expected " + to_string(want) + " field, got " +
                          to_string(f.kind));
  }
}

// Baseline-0 synthetic electrode values.
using ElectrodeFrame = std::array<double, kElectrodeCount>;

// One contact configuration. (u, v) is the contact center in the shared
// planar frame (the DIGIT pad rectangle [0,20]x[0,16] mm); the same spec
// drives both sensors, with the BioTac location obtained by pulling (u, v)
// back through the unfolding map. `angle` is the indenter's spin about the
// contact axis; spherical indenters are invariant to it but the parameter is
// part of the sampling interface.
struct ContactSpec {
  double u = 0.0;      // mm
  double v = 0.0;      // mm
  double force = 0.0;  // N
  double indenter_radius = 0.0;  // mm
  double angle = 0.0;  // degrees
};

inline void validate(const ContactSpec& s) {
  if (!(s.indenter_radius > 0.0)) throw DomainError("ContactSpec: indenter_radius must be > 0");
  if (!(s.force >= 0.0)) throw DomainError("ContactSpec: force must be >= 0");
  if (!std::isfinite(s.u) || !std::isfinite(s.v) || !std::isfinite(s.angle)) {
    throw DomainError("ContactSpec: non-finite field");
  }
}

struct PairedSample {
  ContactSpec spec;
  ElectrodeFrame signal{};
  DeformationField biotac_field;
  DeformationField digit_field;
};

}  // namespace tactx
