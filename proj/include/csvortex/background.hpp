#pragma once

// Singular background u0 with Lap u0 = 4 pi sum alpha_i delta_{p_i} - 4 pi N.
//
// Two representations are kept side by side:
//  * u0 as a Field: the band-limited spectral solve of the delta comb. Its
//    discrete mean is exactly zero and laplacian(u0) + 4 pi N reproduces the
//    band-limited comb to rounding.
//  * exp_u0: pointwise-analytic e^{u0}. The log singularities are
//    exponentiated in closed form, exp_u0 = prod_i r_i^{2 a_i} e^{-4 pi a_i
//    gamma_i}, so the field is smooth and exactly zero at the vortices.
// Solvers only ever consume exp_u0; the sampled u0 serves reporting and the
// supersolution cap.

#include <stdexcept>
#include <vector>

#include "csvortex/green.hpp"
#include "csvortex/spectral.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

struct VortexOnVortex : std::runtime_error {
  VortexOnVortex()
      : std::runtime_error(
            "build_background: coincident vortices; merge multiplicities") {}
};

struct TorusBackground {
  Grid grid;
  VortexConfiguration cfg;
  Field u0;       // band-limited singular part, mean zero
  Field exp_u0;   // analytic e^{u0}, in [0, exp(4 pi C0 N)]
  std::vector<Vec2> regular_gradients;  // grad of regular part of u0 at p_i
  bool resolution_ok = true;            // h <= eps/8 advisory

  /// Exact e^{u0} at an arbitrary (off-grid) point.
  double exp_u0_at(Vec2 x) const {
    double log_reg = 0.0, prod = 1.0;
    for (int i = 0; i < cfg.count(); ++i) {
      const double a = cfg.multiplicities[i];
      const double r = torus_dist(x, cfg.points[i]);
      log_reg += -kFourPi * a * green_regular(x, cfg.points[i]);
      prod *= std::pow(r, 2.0 * a);
    }
    return prod * std::exp(log_reg);
  }
};

/// Spectral delta comb 4 pi sum a_i delta_{p_i}, optionally damped by a
/// Gaussian filter of width sigma (sigma = 0: sharp band-limited comb).
inline SpectralField comb_spectrum(const VortexConfiguration& cfg, Grid g,
                                   double sigma = 0.0) {
  SpectralField s(g);
  const std::complex<double> I(0.0, 1.0);
  for (int mi = 0; mi < g.n; ++mi) {
    const double ki = s.wavenumber(mi);
    for (int mj = 0; mj < g.n; ++mj) {
      const double kj = s.wavenumber(mj);
      std::complex<double> c = 0.0;
      for (int v = 0; v < cfg.count(); ++v)
        c += static_cast<double>(cfg.multiplicities[v]) *
             std::exp(-I * kTwoPi *
                      (ki * cfg.points[v].x + kj * cfg.points[v].y));
      const double damp =
          sigma > 0.0
              ? std::exp(-0.5 * kTwoPi * kTwoPi * (ki * ki + kj * kj) * sigma * sigma)
              : 1.0;
      s.at(mi, mj) = kFourPi * c * damp;
    }
  }
  return s;
}

/// Mean-zero solution of Lap u = comb - 4 pi N (spectrally exact).
inline Field comb_potential(const VortexConfiguration& cfg, Grid g,
                            double sigma = 0.0) {
  SpectralField s = comb_spectrum(cfg, g, sigma);
  for (int mi = 0; mi < g.n; ++mi) {
    const double ki = s.wavenumber(mi);
    for (int mj = 0; mj < g.n; ++mj) {
      const double kj = s.wavenumber(mj);
      if (mi == 0 && mj == 0) {
        s.at(0, 0) = 0.0;
        continue;
      }
      s.at(mi, mj) /= -4.0 * kPi * kPi * (ki * ki + kj * kj);
    }
  }
  return inverse_fft(s);
}

inline TorusBackground build_background(const VortexConfiguration& cfg, Grid g) {
  for (int i = 0; i < cfg.count(); ++i)
    for (int j = i + 1; j < cfg.count(); ++j)
      if (torus_dist(cfg.points[i], cfg.points[j]) < 1e-12)
        throw VortexOnVortex();

  TorusBackground bg;
  bg.grid = g;
  bg.cfg = cfg;
  bg.resolution_ok = (g.h <= cfg.epsilon / 8.0 + 1e-15);
  bg.u0 = comb_potential(cfg, g);

  // exp_u0 = prod_i r_i^{2 a_i} * exp(-4 pi a_i gamma_i): smooth, zero at p_i.
  bg.exp_u0 = Field(g, 1.0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      bg.exp_u0(i, j) = bg.exp_u0_at(g.point(i, j));

  bg.regular_gradients.resize(cfg.count());
  for (int i = 0; i < cfg.count(); ++i) {
    Vec2 grad{0.0, 0.0};
    for (int j = 0; j < cfg.count(); ++j) {
      const double a = cfg.multiplicities[j];
      if (j == i) {
        // own term contributes -4 pi a grad gamma(0) = 0 on the square torus
        continue;
      }
      Vec2 gg = green_gradient(cfg.points[i], cfg.points[j]);
      grad = grad - kFourPi * a * gg;
    }
    bg.regular_gradients[i] = grad;
  }
  return bg;
}

}  // namespace csvortex
