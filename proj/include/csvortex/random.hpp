#pragma once

// Deterministic random helpers. Distribution mapping is done by hand (not
// via std:: distributions) so that a seed gives identical streams on every
// platform, which the CLI's byte-identical-output contract relies on.

#include <cstdint>
#include <random>

#include "csvortex/spectral.hpp"

namespace csvortex {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (deterministic given the seed).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Smooth random field: independent normal coefficients on modes with
/// |k| <= kmax, Hermitian-symmetrized, scaled to the requested sup-norm.
inline Field random_band_limited(Grid g, int kmax, double amplitude, Rng& rng) {
  SpectralField s(g);
  auto wrap = [&](int k) { return k >= 0 ? k : k + g.n; };
  for (int ki = -kmax; ki <= kmax; ++ki) {
    for (int kj = -kmax; kj <= kmax; ++kj) {
      if (ki * ki + kj * kj > kmax * kmax) continue;
      if (ki < 0 || (ki == 0 && kj < 0)) continue;  // one per conjugate pair
      const double a = rng.normal();
      const double b = (ki == 0 && kj == 0) ? 0.0 : rng.normal();
      s.at(wrap(ki), wrap(kj)) += std::complex<double>(a, b);
      if (ki != 0 || kj != 0)
        s.at(wrap(-ki), wrap(-kj)) += std::complex<double>(a, -b);
    }
  }
  Field f = inverse_fft(s);
  const double sup = f.sup_norm();
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

}  // namespace csvortex
