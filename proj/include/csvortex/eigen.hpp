#pragma once

// Smallest-magnitude eigenvalue of -L: a few shift-invert-around-zero warmup
// sweeps followed by Rayleigh-quotient iteration. Inner solves use MINRES
// (the shifted operator is symmetric indefinite by construction near
// convergence); a near-singular inner solve is fine, the solution simply
// aligns with the eigenvector.

#include "csvortex/newton.hpp"

namespace csvortex {

struct IterationStalled : std::runtime_error {
  explicit IterationStalled(const std::string& what) : std::runtime_error(what) {}
};

struct EigenPair {
  double lambda = 0.0;  // eigenvalue of -L closest to zero
  Field vector;
  double residual = 0.0;  // ||L e + lambda e||_2 with ||e||_2 = 1
  int iterations = 0;
};

inline EigenPair smallest_eigenvalue(const LinearizedOperator& L, double tol = 1e-8,
                                     int max_outer = 60) {
  const Grid g = L.potential.grid();
  const double inv_eps2 = 1.0 / (L.epsilon * L.epsilon);
  auto neg_L = [&](const Field& h) { return -1.0 * L.apply(h); };

  // deterministic start with broad spectral content
  Field e = Field::sample(g, [](Vec2 p) {
    return 1.0 + 0.31 * std::cos(kTwoPi * p.x) + 0.17 * std::sin(kTwoPi * p.y) +
           0.05 * std::cos(kTwoPi * (2.0 * p.x - p.y));
  });
  e *= 1.0 / l2_norm(e);

  EigenPair out;
  double shift = 0.0;
  const int warmup = 6;
  for (int it = 0; it < max_outer; ++it) {
    auto op = [&](const Field& h) {
      Field r = neg_L(h);
      if (shift != 0.0) r -= shift * h;
      return r;
    };
    ShiftedInverse M{std::max(inv_eps2 - shift, 1.0)};
    KrylovResult kr = minres(op, e, M, 1e-10, 4000);
    const double znorm = l2_norm(kr.x);
    if (znorm <= 0.0 || !std::isfinite(znorm))
      throw IterationStalled("smallest_eigenvalue: inner solve made no progress");
    Field z = (1.0 / znorm) * kr.x;
    const Field Az = neg_L(z);
    const double lambda = inner(z, Az);
    Field res = Az - lambda * z;
    const double rn = l2_norm(res);
    out.lambda = lambda;
    out.vector = z;
    out.residual = rn;
    out.iterations = it + 1;
    e = z;
    if (rn <= tol * (1.0 + std::abs(lambda))) return out;
    if (it + 1 >= warmup) shift = lambda;  // Rayleigh acceleration
  }
  throw IterationStalled("smallest_eigenvalue: no convergence after " +
                         std::to_string(max_outer) +
                         " outer iterations (residual " +
                         std::to_string(out.residual) + ")");
}

}  // namespace csvortex
