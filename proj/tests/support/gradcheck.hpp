#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tactx/matrix.hpp"

// Central-difference gradient verification: every analytic entry must match
// (L(p+h) - L(p-h)) / 2h within 1e-4 relative (1e-7 absolute near zero).
template <typename LossFn>
inline std::size_t count_gradient_mismatches(
    const std::vector<tactx::num::Matrix*>& params,
    const std::vector<const tactx::num::Matrix*>& analytic, LossFn&& loss,
    double h = 1e-5, double rel_tol = 1e-4, double abs_tol = 1e-7) {
  std::size_t bad = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    tactx::num::Matrix& p = *params[t];
    const tactx::num::Matrix& a = *analytic[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + h;
      const double lp = loss();
      p.data()[i] = saved - h;
      const double lm = loss();
      p.data()[i] = saved;
      const double fd = (lp - lm) / (2.0 * h);
      const double got = a.data()[i];
      const double err = std::abs(fd - got);
      const double scale = std::max(std::abs(fd), std::abs(got));
      if (err > std::max(abs_tol, rel_tol * scale)) ++bad;
    }
  }
  return bad;
}
