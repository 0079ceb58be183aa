#pragma once

// Explicit subsolution of the smooth-variable equation, built from plateau
// bumps over the vortices: solve Lap w = 8 pi N f_delta - C(delta) with mean
// zero, then shift w0 = w - C1 so that u0 + w0 <= ln(1/2). Both subsolution
// inequalities (inside the delta-balls and outside) are verified pointwise
// for the configuration's epsilon.

#include "csvortex/background.hpp"

namespace csvortex {

struct SubsolutionFailed : std::runtime_error {
  explicit SubsolutionFailed(double worst, bool inside)
      : std::runtime_error(std::string("build_subsolution: inequality fails ") +
                           (inside ? "inside" : "outside") +
                           " the bumps, worst violation " + std::to_string(worst)) {}
};

struct Subsolution {
  Field w0;          // the shifted subsolution (compare against solver v)
  Field w;           // unshifted solve of Lap w = g_delta, mean zero
  double delta = 0.0;
  bool delta_clamped = false;
  double shift_c1 = 0.0;
  double margin_inside = 0.0;   // min over the bumps of lhs - rhs
  double margin_outside = 0.0;  // min outside
};

namespace detail {

/// C^2 plateau: 1 for r <= delta, 0 for r >= 2 delta, quintic ramp between.
inline double plateau(double r, double delta) {
  if (r <= delta) return 1.0;
  if (r >= 2.0 * delta) return 0.0;
  const double t = (r - delta) / delta;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace detail

inline Subsolution build_subsolution(const TorusBackground& bg, double delta = 0.0) {
  const VortexConfiguration& cfg = bg.cfg;
  const Grid g = bg.grid;
  const int N = cfg.total_multiplicity();
  if (N < 1) throw std::invalid_argument("build_subsolution: needs N >= 1");
  const double inv_eps2 = 1.0 / (cfg.epsilon * cfg.epsilon);

  Subsolution out;
  out.delta = delta > 0.0 ? delta : 1.0 / std::sqrt(8.0 * kPi * N);
  if (2.0 * out.delta > 0.5) {  // bump must fit in the cell
    out.delta = 0.25;
    out.delta_clamped = true;
  }

  Field f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double best = 0.0;
      for (const auto& p : cfg.points)
        best = std::max(best, detail::plateau(torus_dist(g.point(i, j), p), out.delta));
      f(i, j) = best;
    }

  Field gdelta = (8.0 * kPi * N) * f;
  gdelta += Field(g, -mean(gdelta));
  out.w = solve_helmholtz(gdelta, 0.0);

  // C1 puts the grid max of u0 + w0 exactly at ln(1/2)
  double max_u0w = -1e300;
  for (std::size_t k = 0; k < out.w.values().size(); ++k) {
    const double u0 = std::log(std::max(bg.exp_u0.values()[k], 1e-300));
    max_u0w = std::max(max_u0w, u0 + out.w.values()[k]);
  }
  out.shift_c1 = max_u0w - std::log(0.5);
  out.w0 = out.w + Field(g, -out.shift_c1);

  // Verify Lap w0 >= (1/eps^2) E (E - 1) + 4 pi N pointwise; Lap w0 equals
  // the (band-limited) g_delta by construction of the spectral solve.
  out.margin_inside = 1e300;
  out.margin_outside = 1e300;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double E = bg.exp_u0(i, j) * std::exp(out.w0(i, j));
      const double rhs = inv_eps2 * E * (E - 1.0) + kFourPi * N;
      const double margin = gdelta(i, j) - rhs;
      bool inside = false;
      for (const auto& p : cfg.points)
        if (torus_dist(g.point(i, j), p) <= out.delta) {
          inside = true;
          break;
        }
      (inside ? out.margin_inside : out.margin_outside) =
          std::min(inside ? out.margin_inside : out.margin_outside, margin);
    }
  const double tol = 1e-9 * inv_eps2;
  if (out.margin_inside < -tol) throw SubsolutionFailed(out.margin_inside, true);
  if (out.margin_outside < -tol) throw SubsolutionFailed(out.margin_outside, false);
  return out;
}

}  // namespace csvortex
