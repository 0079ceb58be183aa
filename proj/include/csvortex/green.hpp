#pragma once

// Green function of the Laplacian on the unit torus:
//   -Lap_x G(x,y) = delta_y - 1,   integral of G = 0.
// Evaluated through the exact elliptic-function representation
//   G(x) = -(1/2pi) ln|theta1(pi z)| + x2^2/2 + C,   z = x1 + i x2,
// which splits into the free-space log and a smooth remainder gamma. The
// additive constant has the closed form C = -1/24 + ln(prod(1-q^{2m}))/(2pi),
// obtained by integrating the theta product formula over the cell.

#include <complex>
#include <stdexcept>

#include "csvortex/theta.hpp"

namespace csvortex {

struct DiagonalPoint : std::runtime_error {
  DiagonalPoint() : std::runtime_error("green: x == y (torus distance < 1e-12)") {}
};

namespace detail {

inline double green_constant() {
  static const double c = [] {
    double logp = 0.0;
    for (int m = 1; m <= 16; ++m) logp += std::log1p(-std::exp(-kTwoPi * m));
    return -1.0 / 24.0 + logp / kTwoPi;
  }();
  return c;
}

/// pi * theta1'(pi z)/theta1(pi z) - 1/z, regular at z = 0.
inline std::complex<double> log_deriv_minus_pole(std::complex<double> z) {
  const std::complex<double> t = kPi * z;
  if (std::abs(z) < 1e-4) {
    const double c3 = theta::series_c3();
    const double c5 = theta::series_c5();
    const std::complex<double> t2 = t * t;
    return kPi * t * (2.0 * c3 + 4.0 * c5 * t2) / (1.0 + c3 * t2 + c5 * t2 * t2);
  }
  return kPi * theta::theta1_prime(t) / theta::theta1(t) - 1.0 / z;
}

}  // namespace detail

/// G(x,y); throws DiagonalPoint within 1e-12 of the diagonal.
inline double green(Vec2 x, Vec2 y) {
  const Vec2 d = torus_diff(x, y);
  const double r = d.norm();
  if (r < 1e-12) throw DiagonalPoint();
  const std::complex<double> z(d.x, d.y);
  return -std::log(std::abs(theta::theta1(kPi * z))) / kTwoPi +
         0.5 * d.y * d.y + detail::green_constant();
}

/// Regular part gamma(x,y) = G(x,y) + ln r / (2 pi), smooth through x = y.
inline double green_regular(Vec2 x, Vec2 y) {
  const Vec2 d = torus_diff(x, y);
  const double r = d.norm();
  const std::complex<double> z(d.x, d.y);
  double log_ratio;  // ln|theta1(pi z)| - ln|z|
  if (r < 1e-8) {
    // theta1(pi z) ~ theta1'(0) pi z near the lattice point
    log_ratio = std::log(kPi * theta::deriv0(1));
  } else {
    log_ratio = std::log(std::abs(theta::theta1(kPi * z))) - std::log(r);
  }
  return -log_ratio / kTwoPi + 0.5 * d.y * d.y + detail::green_constant();
}

/// Gradient of G(.,y) with respect to its first argument.
inline Vec2 green_gradient(Vec2 x, Vec2 y) {
  const Vec2 d = torus_diff(x, y);
  if (d.norm() < 1e-12) throw DiagonalPoint();
  const std::complex<double> z(d.x, d.y);
  const std::complex<double> w =
      kPi * theta::theta1_prime(kPi * z) / theta::theta1(kPi * z);
  return {-w.real() / kTwoPi, w.imag() / kTwoPi + d.y};
}

/// Gradient of the regular part; equals (0,0) on the diagonal (square-torus
/// symmetry), and stays accurate for nearby points via the series form.
inline Vec2 green_regular_gradient(Vec2 x, Vec2 y) {
  const Vec2 d = torus_diff(x, y);
  const std::complex<double> z(d.x, d.y);
  if (std::abs(z) == 0.0) return {0.0, 0.0};
  const std::complex<double> w = detail::log_deriv_minus_pole(z);
  return {-w.real() / kTwoPi, w.imag() / kTwoPi + d.y};
}

}  // namespace csvortex
