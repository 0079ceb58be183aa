#pragma once

// Newton-Krylov solver for the smooth-variable torus equation and the
// linearized operator L h = Lap h + (1/eps^2) e^u (1 - 2 e^u) h. The inner
// solves run on -L (symmetric), preconditioned by the spectral inverse of
// (-Lap + 1/eps^2).

#include "csvortex/krylov.hpp"
#include "csvortex/monotone.hpp"

namespace csvortex {

struct NewtonSettings {
  double tol_res = 1e-10;   // L2 residual tolerance (times eps^-2)
  int max_newton = 50;
  double krylov_tol = 1e-4; // relative, inner
  bool line_search = true;  // halving on the residual norm
  int max_krylov = 2000;
};

struct NewtonDiverged : std::runtime_error {
  explicit NewtonDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Pointwise E = exp_u0 * e^v.
inline Field nonlinear_exp(const TorusBackground& bg, const Field& v) {
  Field E = v;
  for (std::size_t k = 0; k < E.values().size(); ++k)
    E.values()[k] = bg.exp_u0.values()[k] * std::exp(v.values()[k]);
  return E;
}

/// PDE residual in the smooth variable:
/// R(v) = Lap v + (1/eps^2) E (1 - E) - 4 pi N.
inline Field residual(const Field& v, const TorusBackground& bg, double eps) {
  const double inv_eps2 = 1.0 / (eps * eps);
  const double N = bg.cfg.total_multiplicity();
  Field R = laplacian(v);
  Field E = nonlinear_exp(bg, v);
  for (std::size_t k = 0; k < R.values().size(); ++k)
    R.values()[k] += inv_eps2 * E.values()[k] * (1.0 - E.values()[k]) -
                     kFourPi * N;
  return R;
}

/// L h = Lap h + potential h with potential = (1/eps^2) e^u (1 - 2 e^u).
struct LinearizedOperator {
  Field base_u;     // linearization point (floored log reconstruction)
  double epsilon = 0.0;
  Field potential;

  LinearizedOperator() = default;

  /// From a smooth-variable iterate on a background.
  LinearizedOperator(const TorusBackground& bg, const Field& v, double eps)
      : base_u(reconstruct_u(bg, v)), epsilon(eps), potential(v.grid()) {
    const Field E = nonlinear_exp(bg, v);
    const double inv_eps2 = 1.0 / (eps * eps);
    for (std::size_t k = 0; k < potential.values().size(); ++k) {
      const double e = E.values()[k];
      potential.values()[k] = inv_eps2 * e * (1.0 - 2.0 * e);
    }
  }

  /// From an explicit exponential field e^u (perturbative constructor path).
  static LinearizedOperator from_exponential(const Field& exp_u, double eps) {
    LinearizedOperator L;
    L.epsilon = eps;
    L.base_u = exp_u;
    L.potential = Field(exp_u.grid());
    const double inv_eps2 = 1.0 / (eps * eps);
    for (std::size_t k = 0; k < exp_u.values().size(); ++k) {
      const double e = exp_u.values()[k];
      L.base_u.values()[k] = std::log(std::max(e, 1e-300));
      L.potential.values()[k] = inv_eps2 * e * (1.0 - 2.0 * e);
    }
    return L;
  }

  Field apply(const Field& h) const {
    Field out = laplacian(h);
    for (std::size_t k = 0; k < out.values().size(); ++k)
      out.values()[k] += potential.values()[k] * h.values()[k];
    return out;
  }
};

/// SPD preconditioner (-Lap + 1/eps^2)^{-1} for the negated operator.
struct ShiftedInverse {
  double shift;
  Field operator()(const Field& r) const {
    return -1.0 * solve_helmholtz(r, shift);
  }
};

inline SolveReport newton_solve(const Field& v0, const TorusBackground& bg,
                                double eps, const NewtonSettings& s = {}) {
  if (!v0.all_finite())
    throw std::invalid_argument("newton_solve: v0 must be finite");
  const double inv_eps2 = 1.0 / (eps * eps);
  SolveReport rep;
  Field v = v0;
  Field R = residual(v, bg, eps);
  double rnorm = l2_norm(R);
  rep.residual_history.push_back(rnorm);

  for (int it = 0; it < s.max_newton; ++it) {
    if (rnorm <= s.tol_res * inv_eps2) {
      rep.converged = true;
      break;
    }
    LinearizedOperator L(bg, v, eps);
    auto neg_L = [&](const Field& h) { return -1.0 * L.apply(h); };
    ShiftedInverse M{inv_eps2};
    // solve -L delta = R  (i.e. L delta = -R)
    Field delta = symmetric_solve(neg_L, R, M, s.krylov_tol, s.max_krylov,
                                  "newton_solve");
    double step = 1.0;
    Field v_trial = v + delta;
    Field R_trial = residual(v_trial, bg, eps);
    double rnorm_trial = l2_norm(R_trial);
    if (s.line_search) {
      int halvings = 0;
      while (rnorm_trial >= rnorm && halvings < 20) {
        step *= 0.5;
        v_trial = v + step * delta;
        R_trial = residual(v_trial, bg, eps);
        rnorm_trial = l2_norm(R_trial);
        ++halvings;
      }
      if (rnorm_trial >= rnorm)
        throw NewtonDiverged("newton_solve: line search exhausted at residual " +
                             std::to_string(rnorm));
    }
    v = v_trial;
    R = R_trial;
    rnorm = rnorm_trial;
    rep.residual_history.push_back(rnorm);
    rep.increment_history.push_back(step * delta.sup_norm());
  }
  if (!rep.converged && rnorm <= s.tol_res * inv_eps2) rep.converged = true;
  if (!rep.converged)
    throw NewtonDiverged("newton_solve: residual " + std::to_string(rnorm) +
                         " after " + std::to_string(s.max_newton) + " steps");

  rep.v = v;
  rep.u = reconstruct_u(bg, v);
  rep.mean_d = mean(v);
  rep.diagnostics["newton_steps"] = static_cast<double>(rep.residual_history.size() - 1);
  rep.diagnostics["final_residual_l2"] = rnorm;
  // quadratic-tail constant from the last three residuals
  const auto& h = rep.residual_history;
  if (h.size() >= 3) {
    const double ra = h[h.size() - 3], rb = h[h.size() - 2], rc = h[h.size() - 1];
    if (rb > 0.0 && ra > 0.0)
      rep.diagnostics["quadratic_tail_c"] =
          std::max(rc / (rb * rb), rb / (ra * ra));
  }
  rep.classification = classify_dichotomy(rep, bg);
  return rep;
}

}  // namespace csvortex
