#pragma once

// Perturbative constructor of torus topological solutions from a planar
// profile psi: u = eta psi_eps + eps^3 v with psi_eps(x) = psi((x - q)/eps),
// eta a radial cutoff at the cluster center q. The correction v is the fixed
// point of G(v) = v - DF(0)^{-1} F(v), with
//
//   F(v) = Lap v + eps^-5 e^{W + eps^3 v}(1 - e^{W + eps^3 v})
//        - eps^-5 eta e^{psi_eps}(1 - e^{psi_eps})
//        + eps^-3 (2 grad eta . grad psi_eps + psi_eps Lap eta),  W = eta psi_eps.
//
// Convergence thresholds act on the eps^3-rescaled residual (the physical
// PDE residual of u); the raw F carries the eps^-5 bookkeeping.

#include "csvortex/newton.hpp"
#include "csvortex/planar.hpp"

namespace csvortex {

struct ContractionFailed : std::runtime_error {
  explicit ContractionFailed(const std::string& what) : std::runtime_error(what) {}
};

/// Smooth radial cutoff: 1 on B_delta, 0 outside B_{2 delta}, C-infinity
/// mollifier ramp between (eta = 1/(1+e^{h}), h = 1/(1-t) - 1/t). The default
/// plateau radius 0.2 puts the annulus far enough out that |F(0)| decays
/// visibly in 1/eps over the workable eps range.
struct Cutoff {
  double delta = 0.2;
  Vec2 center{0.5, 0.5};

  double value(double r) const {
    const double t = (r - delta) / delta;
    if (t <= 0.01) return 1.0;
    if (t >= 0.99) return 0.0;
    return 1.0 / (1.0 + std::exp(ramp(t)));
  }
  /// d eta / dr
  double slope(double r) const {
    const double t = (r - delta) / delta;
    if (t <= 0.01 || t >= 0.99) return 0.0;
    const double e = value(r);
    return -e * (1.0 - e) * ramp_d(t) / delta;
  }
  /// radial Laplacian eta'' + eta'/r
  double laplace(double r) const {
    const double t = (r - delta) / delta;
    if (t <= 0.01 || t >= 0.99) return 0.0;
    const double e = value(r);
    const double ep = -e * (1.0 - e) * ramp_d(t);
    const double epp = -ep * (1.0 - 2.0 * e) * ramp_d(t) - e * (1.0 - e) * ramp_dd(t);
    return epp / (delta * delta) + ep / (delta * r);
  }

 private:
  static double ramp(double t) { return 1.0 / (1.0 - t) - 1.0 / t; }
  static double ramp_d(double t) {
    return 1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t);
  }
  static double ramp_dd(double t) {
    return 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t)) - 2.0 / (t * t * t);
  }
};

/// Precomputed node tables for one (psi, eps, cutoff, grid) combination.
class PerturbContext {
 public:
  PerturbContext(const RadialPsi& psi, double eps, Cutoff cut, Grid grid)
      : eps_(eps), cut_(cut), grid_(grid),
        exp_w_(grid), eta_(grid), source_(grid), base_(grid) {
    // the fitted exponential tail may extend the profile a little, but far
    // extrapolation is refused
    if (2.0 * cut.delta / eps > psi.r_max() + 10.0)
      throw PlanarDomainTooSmall(
          "perturbative: cutoff support 2 delta/eps = " +
          std::to_string(2.0 * cut.delta / eps) +
          " exceeds the planar profile radius " + std::to_string(psi.r_max()));
    const double inv_eps3 = 1.0 / (eps * eps * eps);
    const double inv_eps5 = inv_eps3 / (eps * eps);
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) {
        const Vec2 d = torus_diff(grid.point(i, j), cut.center);
        const double rt = d.norm();
        const double rp = rt / eps;
        const double eta = cut.value(rt);
        eta_(i, j) = eta;
        const double expp = psi.exp_value(rp);
        if (eta >= 1.0) {
          exp_w_(i, j) = expp;
        } else if (eta <= 0.0) {
          exp_w_(i, j) = 1.0;
        } else {
          exp_w_(i, j) = std::exp(eta * psi.value(rp));
        }
        // annulus source eps^-3 (2 grad eta . grad psi_eps + psi_eps Lap eta)
        double src = 0.0;
        if (eta > 0.0 && eta < 1.0) {
          const double p = psi.value(rp);
          const double dp = psi.slope(rp) / eps;  // radial d/dr of psi_eps
          src = inv_eps3 * (2.0 * cut.slope(rt) * dp + p * cut.laplace(rt));
        }
        source_(i, j) = src;
        base_(i, j) = -inv_eps5 * eta * expp * (1.0 - expp) + src;
      }
  }

  const Grid& grid() const { return grid_; }
  double epsilon() const { return eps_; }
  const Cutoff& cutoff() const { return cut_; }
  const Field& exp_w() const { return exp_w_; }

  /// F_eps(v), the raw (eps^-5 scaled) residual of the ansatz.
  Field apply(const Field& v) const {
    const double eps3 = eps_ * eps_ * eps_;
    const double inv_eps5 = 1.0 / (eps3 * eps_ * eps_);
    Field F = laplacian(v);
    for (std::size_t k = 0; k < F.values().size(); ++k) {
      const double E = exp_w_.values()[k] * std::exp(eps3 * v.values()[k]);
      F.values()[k] += inv_eps5 * E * (1.0 - E) + base_.values()[k];
    }
    return F;
  }

  /// DF_eps(0) as a linearized operator (potential eps^-2 e^W (1-2e^W)).
  LinearizedOperator linearization() const {
    return LinearizedOperator::from_exponential(exp_w_, eps_);
  }

  /// Reconstructed torus field u = eta psi_eps + eps^3 v, floored the same
  /// way as reconstruct_u: ln(max(e^W e^{eps^3 v}, 1e-300)).
  Field reconstruct(const Field& v) const {
    const double eps3 = eps_ * eps_ * eps_;
    Field u(grid_);
    for (std::size_t k = 0; k < u.values().size(); ++k) {
      const double E = exp_w_.values()[k] * std::exp(eps3 * v.values()[k]);
      u.values()[k] = std::log(std::max(E, 1e-300));
    }
    return u;
  }

 private:
  double eps_;
  Cutoff cut_;
  Grid grid_;
  Field exp_w_;   // e^{eta psi_eps}, analytic zeros at the vortices
  Field eta_;
  Field source_;  // the eps^-3 annulus source alone
  Field base_;    // v-independent part of F minus the Laplacian
};

struct PerturbState {
  Field v;
  Field u;              // reconstructed eta psi_eps + eps^3 v
  double epsilon = 0.0;
  double residual_norm = 0.0;  // eps^3 | F(v) |_2, the physical residual
  int iterations = 0;
  double contraction_ratio = 0.0;  // last ratio of successive increments
  std::vector<double> increment_history;
  std::vector<double> residual_history;  // eps^3-rescaled
};

/// Fixed-point iteration v <- v - DF(0)^{-1} F(v).
inline PerturbState contraction_solve(const PerturbContext& ctx, double tol = 1e-9,
                                      int max_iter = 60) {
  const double eps = ctx.epsilon();
  const double eps3 = eps * eps * eps;
  const double inv_eps2 = 1.0 / (eps * eps);
  LinearizedOperator DF0 = ctx.linearization();
  auto neg_DF0 = [&](const Field& h) { return -1.0 * DF0.apply(h); };
  ShiftedInverse M{inv_eps2};

  PerturbState st;
  st.epsilon = eps;
  st.v = Field(ctx.grid());

  int slow_streak = 0;
  double prev_inc = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Field F = ctx.apply(st.v);
    st.residual_norm = eps3 * l2_norm(F);
    st.residual_history.push_back(st.residual_norm);
    if (st.residual_norm <= tol) break;
    // delta = -DF(0)^{-1} F, solved as (-DF0) delta = F
    Field delta = symmetric_solve(neg_DF0, F, M, 1e-6, 4000,
                                  "contraction_solve");
    st.v += delta;
    const double inc = delta.sup_norm();
    st.increment_history.push_back(inc);
    st.iterations = it + 1;
    if (prev_inc > 0.0) {
      st.contraction_ratio = inc / prev_inc;
      if (inc > 0.95 * prev_inc) {
        if (++slow_streak >= 10)
          throw ContractionFailed(
              "contraction_solve: increments not decreasing geometrically "
              "(last ratio " + std::to_string(st.contraction_ratio) + ")");
      } else {
        slow_streak = 0;
      }
    }
    prev_inc = inc;
  }
  if (st.residual_norm > tol)
    throw ContractionFailed("contraction_solve: residual " +
                            std::to_string(st.residual_norm) +
                            " above tolerance after " +
                            std::to_string(max_iter) + " iterations");
  st.u = ctx.reconstruct(st.v);
  return st;
}

/// sup |u(q + eps y) - psi(y)| over |y| <= d/eps, sampling u through the
/// analytic background exponential plus the trigonometric interpolant of the
/// smooth variable. Samples closer than 0.25 planar units to a vortex are
/// excluded (both fields diverge there with identical log parts).
inline double rescaled_compare(const Field& v_smooth, const TorusBackground& bg,
                               const RadialPsi& psi, double eps, double d,
                               Vec2 center) {
  SpectralField vs = forward_fft(v_smooth);
  const double rmax = d / eps;
  double sup = 0.0;
  const int nring = 24, nang = 32;
  for (int ir = 0; ir <= nring; ++ir) {
    const double r = rmax * ir / nring;
    if (r < 0.25) continue;
    for (int ia = 0; ia < nang; ++ia) {
      const double th = kTwoPi * ia / nang;
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const Vec2 x = wrap_unit(center + eps * y);
      const double u = std::log(std::max(bg.exp_u0_at(x), 1e-300)) +
                       eval_spectral(vs, x);
      sup = std::max(sup, std::abs(u - psi.value(r)));
    }
  }
  return sup;
}

/// Same comparison for a perturbative state against its own generating psi.
inline double rescaled_compare(const PerturbState& st, const PerturbContext& ctx,
                               const RadialPsi& psi, double d) {
  SpectralField vs = forward_fft(st.v);
  const double eps = ctx.epsilon();
  const double eps3 = eps * eps * eps;
  const double rmax = d / eps;
  double sup = 0.0;
  const int nring = 24, nang = 32;
  for (int ir = 0; ir <= nring; ++ir) {
    const double r = rmax * ir / nring;
    if (r < 0.25) continue;
    for (int ia = 0; ia < nang; ++ia) {
      const double th = kTwoPi * ia / nang;
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const Vec2 x = wrap_unit(ctx.cutoff().center + eps * y);
      const double rt = torus_diff(x, ctx.cutoff().center).norm();
      const double u = ctx.cutoff().value(rt) * psi.value(rt / eps) +
                       eps3 * eval_spectral(vs, x);
      sup = std::max(sup, std::abs(u - psi.value(r)));
    }
  }
  return sup;
}

}  // namespace csvortex
