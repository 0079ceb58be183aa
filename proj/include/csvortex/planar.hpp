#pragma once

// Planar multivortex solves on a truncated box [-R,R]^2 with psi = 0 on the
// boundary. The smooth unknown is v in u = h + v, where h is the standard
// h_n decomposition sum ln(r^2/(1+r^2)) carrying the log singularities.
// Spatial discretization: 5-point Jacobian for the Krylov steps (symmetric,
// DST-preconditioned exactly) and a 4th-order compact (Mehrstellen) residual
// so the converged field is 4th-order accurate.

#include <optional>

#include "csvortex/fft.hpp"
#include "csvortex/io.hpp"
#include "csvortex/krylov.hpp"
#include "csvortex/radial.hpp"

namespace csvortex {

struct PlanarVortex {
  Vec2 p;
  int alpha = 1;
};

struct BoxGrid {
  double R = 0.0;
  int m = 0;         // cells per axis; nodes are (m+1)^2, node 0 at -R
  double dx = 0.0;

  BoxGrid() = default;
  BoxGrid(double R_, int m_) : R(R_), m(m_), dx(2.0 * R_ / m_) {
    if (R_ <= 0.0 || m_ < 8 || m_ % 2 != 0)
      throw std::invalid_argument("BoxGrid: need R > 0 and even m >= 8");
  }
  std::size_t nodes() const { return static_cast<std::size_t>(m + 1) * (m + 1); }
  Vec2 point(int i, int j) const { return {-R + i * dx, -R + j * dx}; }
  bool operator==(const BoxGrid& o) const { return m == o.m && R == o.R; }
};

struct BoxField {
  BoxGrid grid;
  std::vector<double> v;

  BoxField() = default;
  explicit BoxField(BoxGrid g, double fill = 0.0) : grid(g), v(g.nodes(), fill) {}
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * (grid.m + 1) + j]; }
  double at(int i, int j) const {
    return v[static_cast<std::size_t>(i) * (grid.m + 1) + j];
  }
  double sup_norm() const {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  }
};

/// Radial planar profile wrapper: the topological threshold solution of
/// strength alpha with stable evaluation down to r = 0 (series), cubic
/// Hermite interpolation in range, and a fitted exponential tail beyond.
class RadialPsi {
 public:
  RadialPsi() = default;
  RadialPsi(double alpha, double r_max)
      : alpha_(alpha), s_(find_topological_threshold(alpha, r_max)) {
    prof_ = shoot(alpha_, s_, r_max);
    cut_ = prof_.separatrix_end();
    r_cut_ = prof_.r[cut_];
    u_cut_ = prof_.u[cut_];
    fit_tail();
  }

  double alpha() const { return alpha_; }
  double s_star() const { return s_; }
  double tail_c1() const { return c1_; }
  double tail_c2() const { return c2_; }
  double r_max() const { return r_cut_; }
  const RadialProfile& profile() const { return prof_; }

  /// psi(r) for any r > 0. Series start below the profile range, fitted
  /// K0-type tail beyond the separatrix cut.
  double value(double r) const {
    if (r <= 0.0) return -1e300;
    if (r < prof_.r.front()) {
      const double mm = 2.0 * alpha_ + 2.0;
      return 2.0 * alpha_ * std::log(r) + s_ -
             std::exp(s_) * std::pow(r, mm) / (mm * mm);
    }
    if (r >= r_cut_) return u_cut_ * std::exp(-c2_ * (r - r_cut_)) *
                            std::sqrt(r_cut_ / r);
    return prof_.value_at(r);
  }

  double slope(double r) const {
    if (r < prof_.r.front()) {
      const double mm = 2.0 * alpha_ + 2.0;
      return 2.0 * alpha_ / r - std::exp(s_) * std::pow(r, mm - 1.0) / mm;
    }
    if (r >= r_cut_)
      return value(r) * (-c2_ - 0.5 / r);
    return prof_.slope_at(r);
  }

  /// e^psi with the log singularity exponentiated analytically.
  double exp_value(double r) const {
    if (r <= 0.0) return 0.0;
    if (r < prof_.r.front()) {
      const double mm = 2.0 * alpha_ + 2.0;
      return std::pow(r, 2.0 * alpha_) *
             std::exp(s_ - std::exp(s_) * std::pow(r, mm) / (mm * mm));
    }
    return std::exp(value(r));
  }

  /// Regular part psi - 2 alpha ln r, smooth through the origin.
  double regular_value(double r) const {
    if (r < prof_.r.front()) {
      const double mm = 2.0 * alpha_ + 2.0;
      return s_ - std::exp(s_) * std::pow(std::max(r, 0.0), mm) / (mm * mm);
    }
    return value(r) - 2.0 * alpha_ * std::log(r);
  }

 private:
  void fit_tail() {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k <= cut_; ++k) {
      const double au = std::abs(prof_.u[k]);
      if (au > 1e-8 && au < 1e-3 && prof_.r[k] > 2.0) {
        xs.push_back(prof_.r[k]);
        ys.push_back(std::log(au));
      }
    }
    if (xs.size() < 3) {  // short profile: fall back to the unit mass rate
      c2_ = 1.0;
      c1_ = std::abs(u_cut_) * std::exp(c2_ * r_cut_);
      return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
    }
    const double n = static_cast<double>(xs.size());
    c2_ = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    c1_ = std::exp((sy + c2_ * sx) / n);
  }

  double alpha_ = 0.0, s_ = 0.0;
  RadialProfile prof_;
  std::size_t cut_ = 0;
  double r_cut_ = 0.0, u_cut_ = 0.0;
  double c1_ = 0.0, c2_ = 1.0;
};

struct PlanarDomainTooSmall : std::runtime_error {
  explicit PlanarDomainTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct PlanarSolution {
  BoxGrid grid;
  BoxField psi;  // u = h + v, zero on the box boundary
  BoxField v;    // the smooth unknown
  std::vector<PlanarVortex> vortices;
  double decay_c1 = 0.0, decay_c2 = 0.0;
  int newton_steps = 0;
  double final_residual = 0.0;
};

namespace planar_detail {

inline double h_decomposition(const std::vector<PlanarVortex>& vs, Vec2 x) {
  double h = 0.0;
  for (const auto& w : vs) {
    const double r2 = (x - w.p).dot(x - w.p);
    h += w.alpha * std::log(r2 / (1.0 + r2));
  }
  return h;  // -inf at a vortex; callers handle nodes via exp form
}

inline double exp_h(const std::vector<PlanarVortex>& vs, Vec2 x) {
  double e = 1.0;
  for (const auto& w : vs) {
    const double r2 = (x - w.p).dot(x - w.p);
    e *= std::pow(r2 / (1.0 + r2), w.alpha);
  }
  return e;
}

inline double g_h(const std::vector<PlanarVortex>& vs, Vec2 x) {
  double g = 0.0;
  for (const auto& w : vs) {
    const double r2 = (x - w.p).dot(x - w.p);
    const double d = 1.0 + r2;
    g += 4.0 * w.alpha / (d * d);
  }
  return g;
}

/// DST-diagonal preconditioner for (-Lap5 + shift) on the interior nodes.
struct DirichletShiftedInverse {
  int m;          // cells per axis; interior M = m - 1
  double dx;
  double shift;

  std::vector<double> operator()(const std::vector<double>& r) const {
    const int M = m - 1;
    std::vector<double> work = r;
    dst1_2d(M, work);
    const double norm = 1.0 / (4.0 * static_cast<double>(m) * m);
    for (int j = 0; j < M; ++j) {
      const double sj = std::sin(0.5 * kPi * (j + 1) / m);
      for (int l = 0; l < M; ++l) {
        const double sl = std::sin(0.5 * kPi * (l + 1) / m);
        const double lam = 4.0 / (dx * dx) * (sj * sj + sl * sl);
        work[static_cast<std::size_t>(j) * M + l] *= norm / (lam + shift);
      }
    }
    dst1_2d(M, work);
    return work;
  }
};

}  // namespace planar_detail

/// Newton-Krylov solve of Lap u + e^u (1 - e^u) = 4 pi sum alpha_i delta_{p_i}
/// on [-R,R]^2 with u = 0 on the boundary, warm-started from superposed
/// radial threshold profiles.
inline PlanarSolution planar_multivortex_solve(
    const std::vector<PlanarVortex>& vortices, double R, int m,
    double tol_res = 1e-10, int max_newton = 30) {
  using namespace planar_detail;
  if (R < 20.0)
    throw std::invalid_argument("planar_multivortex_solve: R >= 20 required");
  for (const auto& w : vortices)
    if (std::abs(w.p.x) > R / 2 || std::abs(w.p.y) > R / 2)
      throw std::invalid_argument(
          "planar_multivortex_solve: vortices must lie in [-R/2, R/2]^2");

  BoxGrid g(R, m);
  const int M = m - 1;  // interior nodes per axis
  const double dx = g.dx;

  // radial warm-start profiles, one per distinct multiplicity
  std::map<int, RadialPsi> radial;
  for (const auto& w : vortices)
    if (!radial.count(w.alpha)) radial.emplace(w.alpha, RadialPsi(w.alpha, 40.0));

  // node tables
  BoxField exph(g), gh(g), vbc(g);  // vbc holds -h on the boundary ring
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const Vec2 x = g.point(i, j);
      exph.at(i, j) = exp_h(vortices, x);
      gh.at(i, j) = g_h(vortices, x);
    }
  for (int i = 0; i <= m; ++i)
    for (int j : {0, m}) {
      vbc.at(i, j) = -h_decomposition(vortices, g.point(i, j));
      vbc.at(j, i) = -h_decomposition(vortices, g.point(j, i));
    }

  // warm start: v = sum_i [psi_rad,i - h_i], combined stably near vortices
  auto vstart_at = [&](Vec2 x) {
    double v = 0.0;
    for (const auto& w : vortices) {
      const double r = (x - w.p).norm();
      const RadialPsi& rp = radial.at(w.alpha);
      // psi_i - h_i = regular(psi_i) + alpha ln(1 + r^2)
      v += rp.regular_value(r) + w.alpha * std::log1p(r * r);
    }
    return v;
  };

  std::vector<double> v(static_cast<std::size_t>(M) * M);  // interior unknowns
  auto vidx = [M](int i, int j) { return static_cast<std::size_t>(i - 1) * M + (j - 1); };
  for (int i = 1; i < m; ++i)
    for (int j = 1; j < m; ++j) v[vidx(i, j)] = vstart_at(g.point(i, j));

  auto v_node = [&](const std::vector<double>& vv, int i, int j) -> double {
    if (i == 0 || j == 0 || i == m || j == m) return vbc.at(i, j);
    return vv[vidx(i, j)];
  };

  // W(v) = E (1 - E) - g_h on all nodes (boundary uses the BC value)
  auto w_node = [&](const std::vector<double>& vv, int i, int j) {
    const double E = exph.at(i, j) * std::exp(v_node(vv, i, j));
    return E * (1.0 - E) - gh.at(i, j);
  };

  // 4th-order compact residual on interior nodes
  auto mehrstellen_residual = [&](const std::vector<double>& vv) {
    std::vector<double> res(v.size());
    const double c0 = -20.0 / (6.0 * dx * dx), c1 = 4.0 / (6.0 * dx * dx),
                 c2 = 1.0 / (6.0 * dx * dx);
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        const double av =
            c0 * v_node(vv, i, j) +
            c1 * (v_node(vv, i + 1, j) + v_node(vv, i - 1, j) +
                  v_node(vv, i, j + 1) + v_node(vv, i, j - 1)) +
            c2 * (v_node(vv, i + 1, j + 1) + v_node(vv, i + 1, j - 1) +
                  v_node(vv, i - 1, j + 1) + v_node(vv, i - 1, j - 1));
        const double bw =
            (8.0 * w_node(vv, i, j) + w_node(vv, i + 1, j) + w_node(vv, i - 1, j) +
             w_node(vv, i, j + 1) + w_node(vv, i, j - 1)) /
            12.0;
        res[vidx(i, j)] = av + bw;
      }
    return res;
  };

  auto l2 = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s) * dx;
  };

  // symmetric 5-point Jacobian apply on interior vectors (homogeneous BC)
  std::vector<double> pot(v.size());
  auto jacobian_apply = [&](const std::vector<double>& h) {
    std::vector<double> out(h.size());
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        const double hc = h[vidx(i, j)];
        const double hn = (i + 1 < m) ? h[vidx(i + 1, j)] : 0.0;
        const double hs = (i - 1 > 0) ? h[vidx(i - 1, j)] : 0.0;
        const double he = (j + 1 < m) ? h[vidx(i, j + 1)] : 0.0;
        const double hw = (j - 1 > 0) ? h[vidx(i, j - 1)] : 0.0;
        out[vidx(i, j)] = (hn + hs + he + hw - 4.0 * hc) / (dx * dx) +
                          pot[vidx(i, j)] * hc;
      }
    return out;
  };

  DirichletShiftedInverse prec{m, dx, 1.0};

  PlanarSolution sol;
  sol.grid = g;
  sol.vortices = vortices;

  std::vector<double> res = mehrstellen_residual(v);
  double rnorm = l2(res);
  for (int it = 0; it < max_newton && rnorm > tol_res; ++it) {
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        const double E = exph.at(i, j) * std::exp(v[vidx(i, j)]);
        pot[vidx(i, j)] = E * (1.0 - 2.0 * E);
      }
    // solve -(Lap5 + pot) delta = res  =>  v += delta
    auto neg_jac = [&](const std::vector<double>& h) {
      auto out = jacobian_apply(h);
      for (double& x : out) x = -x;
      return out;
    };
    // hand-rolled CG/MINRES over raw vectors (dx^2 inner product)
    std::vector<double> delta(v.size(), 0.0), r = res, z = prec(r), p = z;
    double rz = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) rz += r[k] * z[k];
    bool cg_ok = false;
    for (int cg = 0; cg < 600; ++cg) {
      auto Ap = neg_jac(p);
      double pAp = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) pAp += p[k] * Ap[k];
      if (pAp <= 0.0) break;  // indefinite; bail to damped gradient step
      const double alpha = rz / pAp;
      double rn2 = 0.0;
      for (std::size_t k = 0; k < delta.size(); ++k) {
        delta[k] += alpha * p[k];
        r[k] -= alpha * Ap[k];
        rn2 += r[k] * r[k];
      }
      if (std::sqrt(rn2) * dx <= 1e-4 * rnorm) {
        cg_ok = true;
        break;
      }
      z = prec(r);
      double rz_new = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) rz_new += r[k] * z[k];
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + (rz_new / rz) * p[k];
      rz = rz_new;
    }
    if (!cg_ok && l2(delta) == 0.0) delta = prec(res);  // fallback direction

    double step = 1.0;
    std::vector<double> v_trial(v.size());
    double rnorm_trial = 0.0;
    std::vector<double> res_trial;
    for (int ls = 0; ls <= 20; ++ls) {
      for (std::size_t k = 0; k < v.size(); ++k) v_trial[k] = v[k] + step * delta[k];
      res_trial = mehrstellen_residual(v_trial);
      rnorm_trial = l2(res_trial);
      if (rnorm_trial < rnorm) break;
      step *= 0.5;
    }
    if (rnorm_trial >= rnorm)
      throw LinearSolveStalled("planar_multivortex_solve: no descent at residual " +
                               std::to_string(rnorm));
    v = v_trial;
    res = res_trial;
    rnorm = rnorm_trial;
    sol.newton_steps = it + 1;
  }
  if (rnorm > tol_res)
    throw LinearSolveStalled("planar_multivortex_solve: residual " +
                             std::to_string(rnorm) + " after Newton budget");
  sol.final_residual = rnorm;

  // assemble psi = h + v (boundary exactly zero) and the v field
  sol.v = BoxField(g);
  sol.psi = BoxField(g);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const double vv = v_node(v, i, j);
      sol.v.at(i, j) = vv;
      if (i == 0 || j == 0 || i == m || j == m) {
        sol.psi.at(i, j) = 0.0;
      } else {
        const double eh = exph.at(i, j);
        sol.psi.at(i, j) =
            (eh > 0.0) ? std::log(eh) + vv
                       : std::log(1e-300);  // node exactly on a vortex
      }
    }

  // exponential decay fit of |psi| over the annulus [R/3, 2R/3]
  {
    std::vector<double> xs, ys;
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        const double r = g.point(i, j).norm();
        const double a = std::abs(sol.psi.at(i, j));
        if (r > R / 3.0 && r < 2.0 * R / 3.0 && a > 1e-14) {
          xs.push_back(r);
          ys.push_back(std::log(a));
        }
      }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k]; sy += ys[k]; sxx += xs[k] * xs[k]; sxy += xs[k] * ys[k];
    }
    const double n = static_cast<double>(xs.size());
    sol.decay_c2 = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    sol.decay_c1 = std::exp((sy + sol.decay_c2 * sx) / n);
  }
  return sol;
}

/// Export psi as raw little-endian float64 (row-major over the (m+1)^2
/// nodes) plus a JSON sidecar carrying the box geometry, vortex list, and
/// the fitted decay constants.
inline void dump_planar_solution(const PlanarSolution& sol,
                                 const std::filesystem::path& stem) {
  nlohmann::json meta;
  meta["R"] = sol.grid.R;
  meta["m"] = sol.grid.m;
  meta["decay_fit"] = {{"c1", sol.decay_c1}, {"c2", sol.decay_c2}};
  auto vlist = nlohmann::json::array();
  for (const auto& w : sol.vortices)
    vlist.push_back({{"x", w.p.x}, {"y", w.p.y}, {"alpha", w.alpha}});
  meta["vortices"] = vlist;
  meta["newton_steps"] = sol.newton_steps;
  meta["final_residual"] = sol.final_residual;
  {
    std::ofstream js(stem.string() + ".json");
    js << meta.dump(2) << "\n";
  }
  std::ofstream bin(stem.string() + ".f64", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(sol.psi.v.data()),
            static_cast<std::streamsize>(sol.psi.v.size() * sizeof(double)));
}

}  // namespace csvortex
