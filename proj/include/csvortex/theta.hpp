#pragma once

// First Jacobi theta function for the square lattice (nome q = e^{-pi}).
// The q-series terms decay like exp(-pi (j+1/2)^2), so a handful of terms
// reach machine precision for arguments reduced to |Im z| <= 1/2.

#include <complex>

#include "csvortex/core.hpp"

namespace csvortex {
namespace theta {

using cplx = std::complex<double>;

inline constexpr int kTerms = 8;

inline double coeff(int j) {
  return std::exp(-kPi * (j + 0.5) * (j + 0.5));
}

/// theta_1(v) = 2 sum_{j>=0} (-1)^j q^{(j+1/2)^2} sin((2j+1) v)
inline cplx theta1(cplx v) {
  cplx s = 0.0;
  double sign = 1.0;
  for (int j = 0; j < kTerms; ++j) {
    s += sign * coeff(j) * std::sin((2.0 * j + 1.0) * v);
    sign = -sign;
  }
  return 2.0 * s;
}

inline cplx theta1_prime(cplx v) {
  cplx s = 0.0;
  double sign = 1.0;
  for (int j = 0; j < kTerms; ++j) {
    const double m = 2.0 * j + 1.0;
    s += sign * coeff(j) * m * std::cos(m * v);
    sign = -sign;
  }
  return 2.0 * s;
}

/// Odd derivatives at 0; theta1(v) = t1*(v + c3 v^3 + c5 v^5 + ...).
inline double deriv0(int order) {
  double s = 0.0, sign = 1.0;
  for (int j = 0; j < kTerms; ++j) {
    const double m = 2.0 * j + 1.0;
    s += sign * coeff(j) * std::pow(m, order);
    sign = -sign;
  }
  return 2.0 * s;
}

inline double series_c3() {
  static const double c = -deriv0(3) / (6.0 * deriv0(1));
  return c;
}

inline double series_c5() {
  static const double c = deriv0(5) / (120.0 * deriv0(1));
  return c;
}

}  // namespace theta
}  // namespace csvortex
