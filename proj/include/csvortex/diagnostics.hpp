#pragma once

// Integral identities and asymptotic checks on converged solutions: flux
// quantization, the Pohozaev cluster identity, exterior decay, and the
// randomized uniqueness probe.

#include "csvortex/eigen.hpp"
#include "csvortex/random.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

struct ClusterNotIsolated : std::runtime_error {
  explicit ClusterNotIsolated(const std::string& what) : std::runtime_error(what) {}
};

/// Total flux (1/eps^2) int e^u (1 - e^u); equals 4 pi N for solutions.
inline double flux(const SolveReport& report, const TorusBackground& bg,
                   double eps) {
  Field E = nonlinear_exp(bg, report.v);
  double s = 0.0, c = 0.0;
  for (double e : E.values()) {
    const double y = e * (1.0 - e) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  const double h = bg.grid.h;
  return s * h * h / (eps * eps);
}

/// Share of the flux carried by the 10-eps vortex balls.
inline double flux_localization(const SolveReport& report,
                                const TorusBackground& bg, double eps,
                                double radius_factor = 10.0) {
  Field E = nonlinear_exp(bg, report.v);
  const Grid& g = bg.grid;
  double inside = 0.0, total = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double e = E(i, j);
      const double w = e * (1.0 - e);
      total += w;
      for (const auto& p : bg.cfg.points)
        if (torus_dist(g.point(i, j), p) < radius_factor * eps) {
          inside += w;
          break;
        }
    }
  return total > 0.0 ? inside / total : 1.0;
}

struct PohozaevResult {
  double lhs = 0.0;  // (1/eps^2) int_{B_{r eps}(q)} (1 - e^u)^2
  double rhs = 0.0;  // 4 pi l^2 + 4 pi sum p_i . grad v(p_i)
  double gap = 0.0;  // |lhs - rhs| / rhs
  double gradient_term = 0.0;
  int cluster_size = 0;  // l, counted with multiplicity
  double ball_radius = 0.0;
};

/// Pohozaev identity for one isolated cluster. The ball B_{factor*eps}(q) is
/// centered at the cluster's first vortex (so p_1 plays the origin role)
/// and must not meet any other cluster.
inline PohozaevResult pohozaev(const SolveReport& report,
                               const TorusBackground& bg, double eps,
                               double ball_radius_factor,
                               const std::vector<int>& cluster_indices) {
  const Grid& g = bg.grid;
  if (cluster_indices.empty())
    throw std::invalid_argument("pohozaev: empty cluster");
  const Vec2 q = bg.cfg.points[cluster_indices.front()];
  const double rad = ball_radius_factor * eps;

  for (int i = 0; i < bg.cfg.count(); ++i) {
    const bool inside = torus_dist(bg.cfg.points[i], q) <= rad;
    const bool member =
        std::find(cluster_indices.begin(), cluster_indices.end(), i) !=
        cluster_indices.end();
    if (member && !inside)
      throw ClusterNotIsolated("pohozaev: cluster member outside the ball");
    if (!member && inside)
      throw ClusterNotIsolated("pohozaev: foreign vortex inside the ball");
  }

  PohozaevResult out;
  out.ball_radius = rad;

  // lhs: cell-center quadrature of (1 - e^u)^2 over the ball
  Field E = nonlinear_exp(bg, report.v);
  double s = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (torus_dist(g.point(i, j), q) <= rad) {
        const double w = 1.0 - E(i, j);
        s += w * w;
      }
  out.lhs = s * g.h * g.h / (eps * eps);

  // rhs: 4 pi l^2 + 4 pi sum (p_i - q) . grad v(p_i), with
  // v = u - 2 sum_{cluster} ln|x - p_i| assembled from the solver's smooth
  // field (spectral gradient) plus the background's analytic pieces.
  int l = 0;
  for (int idx : cluster_indices) l += bg.cfg.multiplicities[idx];
  out.cluster_size = l;

  SpectralField vx, vy;
  {
    auto grads = gradient(report.v);
    vx = forward_fft(grads[0]);
    vy = forward_fft(grads[1]);
  }
  double grad_term = 0.0;
  for (int idx : cluster_indices) {
    const Vec2 p = bg.cfg.points[idx];
    // smooth solver part, interpolated spectrally
    Vec2 gv{eval_spectral(vx, p), eval_spectral(vy, p)};
    // regular part of u0 at p (all logs removed through G, gamma-grads kept)
    gv = gv + bg.regular_gradients[idx];
    // the identity subtracts euclidean cluster logs while u0 carries -4 pi a G:
    // per fellow member the difference contributes -2 a (p - p_j)/|p - p_j|^2
    for (int jdx : cluster_indices) {
      if (jdx == idx) continue;
      const Vec2 pj = bg.cfg.points[jdx];
      const double aj = bg.cfg.multiplicities[jdx];
      const Vec2 d = torus_diff(p, pj);
      const double r2 = d.dot(d);
      gv = gv - Vec2{2.0 * aj * d.x / r2, 2.0 * aj * d.y / r2};
    }
    const Vec2 rel = torus_diff(p, q);
    grad_term += rel.dot(gv);
  }
  out.gradient_term = kFourPi * grad_term;
  out.rhs = kFourPi * l * l + out.gradient_term;
  out.gap = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  return out;
}

/// Exterior decay table: sup |u| outside the union of R*eps balls.
struct DecayRow {
  double radius_factor = 0.0;
  double sup_outside = 0.0;
};

inline std::vector<DecayRow> exterior_decay(const SolveReport& report,
                                            const TorusBackground& bg,
                                            double eps,
                                            const std::vector<double>& radii) {
  const Grid& g = report.u.grid();
  std::vector<DecayRow> table;
  for (double R : radii) {
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        bool in_core = false;
        for (const auto& p : bg.cfg.points)
          if (torus_dist(g.point(i, j), p) < R * eps) {
            in_core = true;
            break;
          }
        if (!in_core) sup = std::max(sup, std::abs(report.u(i, j)));
      }
    table.push_back({R, sup});
  }
  return table;
}

/// Exterior (1-e^u)^2 mass beyond the r*eps balls (vanishing tail share).
inline double exterior_pohozaev_mass(const SolveReport& report,
                                     const TorusBackground& bg, double eps,
                                     double radius_factor) {
  const Grid& g = bg.grid;
  Field E = nonlinear_exp(bg, report.v);
  double s = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      bool in_core = false;
      for (const auto& p : bg.cfg.points)
        if (torus_dist(g.point(i, j), p) < radius_factor * eps) {
          in_core = true;
          break;
        }
      if (!in_core) {
        const double w = 1.0 - E(i, j);
        s += w * w;
      }
    }
  return s * g.h * g.h / (eps * eps);
}

enum class UniquenessVerdict { Unique, Ambiguous };

struct UniquenessReport {
  UniquenessVerdict verdict = UniquenessVerdict::Ambiguous;
  int trials = 0;
  int converged_trials = 0;
  double worst_sup_diff = 0.0;   // against the maximal solution
  double lambda_min = 0.0;       // of -L at the maximal solution
  double lambda_min_eps2 = 0.0;
  std::vector<double> trial_diffs;
};

/// Restart newton_solve from the maximal solution plus seeded band-limited
/// perturbations (|k| <= 8, amplitude 0.5); all converged runs must agree
/// with the maximal solution within 1e-6 sup-norm.
inline UniquenessReport uniqueness_probe(const VortexConfiguration& cfg,
                                         const TorusBackground& bg, double eps,
                                         int trials, std::uint64_t seed,
                                         const SolveReport& maximal,
                                         const NewtonSettings& ns = {}) {
  if (trials < 2) throw std::invalid_argument("uniqueness_probe: trials >= 2");
  if (cfg.count() != bg.cfg.count() || cfg.epsilon != bg.cfg.epsilon)
    throw std::invalid_argument(
        "uniqueness_probe: configuration does not match the background");
  UniquenessReport out;
  out.trials = trials;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Field pert = random_band_limited(bg.grid, 8, 0.5, rng);
    try {
      auto rep = newton_solve(maximal.v + pert, bg, eps, ns);
      if (!rep.converged) continue;
      ++out.converged_trials;
      const double diff = (rep.u - maximal.u).sup_norm();
      out.trial_diffs.push_back(diff);
      out.worst_sup_diff = std::max(out.worst_sup_diff, diff);
    } catch (const std::exception&) {
      out.trial_diffs.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  out.verdict = (out.converged_trials >= 1 && out.worst_sup_diff <= 1e-6)
                    ? UniquenessVerdict::Unique
                    : UniquenessVerdict::Ambiguous;
  LinearizedOperator L(bg, maximal.v, eps);
  auto pair = smallest_eigenvalue(L, 1e-6);
  out.lambda_min = pair.lambda;
  out.lambda_min_eps2 = pair.lambda * eps * eps;
  return out;
}

}  // namespace csvortex
