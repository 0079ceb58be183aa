#pragma once

// Spectral differential operators on the torus: Laplacian with symbol
// -4*pi^2*|k|^2, constant-coefficient Helmholtz inverses, gradients, and
// exact trigonometric point evaluation.

#include <complex>
#include <stdexcept>

#include "csvortex/fft.hpp"

namespace csvortex {

struct MeanNotZero : std::runtime_error {
  explicit MeanNotZero(double m)
      : std::runtime_error("solve_helmholtz: kappa = 0 requires mean-zero rhs, "
                           "got mean = " + std::to_string(m)) {}
};

inline Field laplacian(const Field& f) {
  SpectralField s = forward_fft(f);
  const int n = s.grid.n;
  for (int mi = 0; mi < n; ++mi) {
    const double ki = s.wavenumber(mi);
    for (int mj = 0; mj < n; ++mj) {
      const double kj = s.wavenumber(mj);
      s.at(mi, mj) *= -4.0 * kPi * kPi * (ki * ki + kj * kj);
    }
  }
  return inverse_fft(s);
}

/// Solve (Lap - kappa) v = rhs. For kappa = 0 the rhs must have mean zero
/// (|mean| <= 1e-10) and the zero mode of v is pinned to 0.
inline Field solve_helmholtz(const Field& rhs, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("solve_helmholtz: kappa < 0");
  SpectralField s = forward_fft(rhs);
  const int n = s.grid.n;
  if (kappa == 0.0) {
    const double m = s.at(0, 0).real();
    if (std::abs(m) > 1e-10) throw MeanNotZero(m);
  }
  for (int mi = 0; mi < n; ++mi) {
    const double ki = s.wavenumber(mi);
    for (int mj = 0; mj < n; ++mj) {
      const double kj = s.wavenumber(mj);
      const double sym = -4.0 * kPi * kPi * (ki * ki + kj * kj) - kappa;
      if (mi == 0 && mj == 0 && kappa == 0.0)
        s.at(0, 0) = 0.0;
      else
        s.at(mi, mj) /= sym;
    }
  }
  return inverse_fft(s);
}

/// Spectral gradient (d/dx1, d/dx2). The Nyquist mode is odd under k -> -k,
/// so its first-derivative contribution is dropped to keep the result real.
inline std::array<Field, 2> gradient(const Field& f) {
  SpectralField s = forward_fft(f);
  const int n = s.grid.n;
  SpectralField gx(s.grid), gy(s.grid);
  const std::complex<double> I(0.0, 1.0);
  for (int mi = 0; mi < n; ++mi) {
    const double ki = (mi == n / 2) ? 0.0 : s.wavenumber(mi);
    for (int mj = 0; mj < n; ++mj) {
      const double kj = (mj == n / 2) ? 0.0 : s.wavenumber(mj);
      const auto c = s.at(mi, mj);
      gx.at(mi, mj) = I * (kTwoPi * ki) * c;
      gy.at(mi, mj) = I * (kTwoPi * kj) * c;
    }
  }
  return {inverse_fft(gx), inverse_fft(gy)};
}

/// Exact evaluation of the trigonometric interpolant at an arbitrary point.
/// The Nyquist row/column is evaluated with k = -n/2 (real part convention).
inline double eval_spectral(const SpectralField& s, Vec2 p) {
  const int n = s.grid.n;
  const std::complex<double> I(0.0, 1.0);
  std::vector<std::complex<double>> ex(n), ey(n);
  for (int m = 0; m < n; ++m) {
    const double k = s.wavenumber(m);
    ex[m] = std::exp(I * (kTwoPi * k * p.x));
    ey[m] = std::exp(I * (kTwoPi * k * p.y));
  }
  std::complex<double> total = 0.0;
  for (int mi = 0; mi < n; ++mi) {
    std::complex<double> row = 0.0;
    for (int mj = 0; mj < n; ++mj) row += s.at(mi, mj) * ey[mj];
    total += row * ex[mi];
  }
  return total.real();
}

}  // namespace csvortex
