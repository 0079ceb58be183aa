// Perturbative constructor: residual smallness and its exponential decay,
// self-adjointness and consistency of the linearization, contraction
// convergence, and agreement of the reconstructed solution with the direct
// torus solvers.

#include <catch2/catch.hpp>

#include "csvortex/perturbative.hpp"
#include "csvortex/monotone.hpp"
#include "csvortex/random.hpp"

using namespace csvortex;

namespace {
const RadialPsi& shared_psi() {
  static RadialPsi psi(1.0, 40.0);
  return psi;
}
}  // namespace

TEST_CASE("cutoff profile properties", "[perturbative]") {
  Cutoff cut;
  cut.delta = 0.15;
  CHECK(cut.value(0.0) == 1.0);
  CHECK(cut.value(0.14) == 1.0);
  CHECK(cut.value(0.31) == 0.0);
  for (double r : {0.16, 0.2, 0.25, 0.29}) {
    CHECK(cut.value(r) > 0.0);
    CHECK(cut.value(r) < 1.0);
    // derivative consistency
    const double t = 1e-6;
    CHECK(cut.slope(r) ==
          Approx((cut.value(r + t) - cut.value(r - t)) / (2 * t)).margin(1e-5));
    const double lap_fd = (cut.value(r + t) - 2 * cut.value(r) + cut.value(r - t)) / (t * t) +
                          cut.slope(r) / r;
    CHECK(cut.laplace(r) == Approx(lap_fd).margin(1e-2 * (1 + std::abs(lap_fd))));
  }
  // support of the derivatives stays in the annulus
  CHECK(cut.slope(0.14) == 0.0);
  CHECK(cut.slope(0.32) == 0.0);
}

TEST_CASE("F(0) is exponentially small in 1/eps", "[perturbative]") {
  const auto& psi = shared_psi();
  Cutoff cut;
  std::vector<double> inv_eps, lognorm;
  for (double eps : {0.05, 0.04, 0.03, 0.025}) {
    Grid g(eps >= 0.04 ? 128 : 192);
    PerturbContext ctx(psi, eps, cut, g);
    const double f0 = l2_norm(ctx.apply(Field(g)));
    inv_eps.push_back(1.0 / eps);
    lognorm.push_back(std::log(f0));
  }
  // affine decrease of log |F(0)| vs 1/eps
  for (std::size_t k = 1; k < lognorm.size(); ++k) CHECK(lognorm[k] < lognorm[k - 1]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(inv_eps.size());
  for (std::size_t k = 0; k < inv_eps.size(); ++k) {
    sx += inv_eps[k]; sy += lognorm[k];
    sxx += inv_eps[k] * inv_eps[k]; sxy += inv_eps[k] * lognorm[k];
    syy += lognorm[k] * lognorm[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r2 = (n * sxy - sx * sy) * (n * sxy - sx * sy) /
                    ((n * sxx - sx * sx) * (n * syy - sy * sy));
  INFO("slope = " << slope << " R^2 = " << r2);
  CHECK(slope < 0.0);
  CHECK(r2 >= 0.99);
}

TEST_CASE("DF(0) is self-adjoint and matches directional differences",
          "[perturbative]") {
  const auto& psi = shared_psi();
  const double eps = 0.05;
  Grid g(128);
  Cutoff cut;
  PerturbContext ctx(psi, eps, cut, g);
  LinearizedOperator DF0 = ctx.linearization();

  Rng rng(31);
  Field h1 = random_band_limited(g, 6, 1.0, rng);
  Field h2 = random_band_limited(g, 6, 1.0, rng);

  SECTION("self-adjointness in the discrete inner product") {
    const double a = inner(h1, DF0.apply(h2));
    const double b = inner(h2, DF0.apply(h1));
    CHECK(a == Approx(b).margin(1e-10 * std::abs(a)));
  }

  SECTION("(F(t h) - F(0))/t converges to DF(0) h at rate O(t)") {
    Field F0 = ctx.apply(Field(g));
    Field Lh = DF0.apply(h1);
    double err_prev = 0.0;
    for (double t : {1e-2, 1e-3}) {
      Field diff = (1.0 / t) * (ctx.apply(t * h1) - F0);
      const double err = (diff - Lh).sup_norm();
      if (err_prev > 0.0) CHECK(err < 0.2 * err_prev);
      err_prev = err;
    }
  }
}

TEST_CASE("contraction converges and tightens with eps", "[perturbative]") {
  const auto& psi = shared_psi();
  Cutoff cut;
  double ratio_at_005 = 0.0, ratio_at_002 = 0.0;
  for (double eps : {0.05, 0.02}) {
    Grid g(eps >= 0.04 ? 192 : 320);
    PerturbContext ctx(psi, eps, cut, g);
    auto st = contraction_solve(ctx, 1e-9);
    CHECK(st.residual_norm <= 1e-9);
    CHECK(st.v.all_finite());
    // the discrete H2-like norm stays inside the unit ball after scaling
    CHECK(eps * eps * eps * st.v.sup_norm() < 1.0);
    (eps == 0.05 ? ratio_at_005 : ratio_at_002) =
        st.contraction_ratio > 0 ? st.contraction_ratio : 1e-3;
  }
  CHECK(ratio_at_002 <= ratio_at_005);
}

TEST_CASE("reconstructed solution solves the torus equation", "[perturbative]") {
  const auto& psi = shared_psi();
  const double eps = 0.03;
  Grid g(384);
  Cutoff cut;
  PerturbContext ctx(psi, eps, cut, g);
  auto st = contraction_solve(ctx, 1e-10);

  auto cfg = VortexConfiguration::single(cut.center, 1, eps);
  auto bg = build_background(cfg, g);

  SECTION("algebraic identity: the eps^3-scaled F equals the torus residual") {
    // v_torus = ln(e^W / e^{u0}) + eps^3 v; the background discrepancy D is
    // v-independent, so R_t(v_torus) - eps^3 F(v) must not move with v.
    auto v_torus_of = [&](const Field& v) {
      Field vt = (eps * eps * eps) * v;
      for (std::size_t k = 0; k < vt.values().size(); ++k)
        vt.values()[k] += std::log(std::max(ctx.exp_w().values()[k], 1e-300)) -
                          std::log(std::max(bg.exp_u0.values()[k], 1e-300));
      return vt;
    };
    Field D0 = residual(v_torus_of(Field(g)), bg, eps) -
               (eps * eps * eps) * ctx.apply(Field(g));
    Rng rng(5);
    Field v = random_band_limited(g, 6, 0.5, rng);
    Field D1 = residual(v_torus_of(v), bg, eps) - (eps * eps * eps) * ctx.apply(v);
    CHECK((D1 - D0).sup_norm() < 1e-9 / (eps * eps));
  }

  SECTION("cross-solver agreement with the monotone maximal solution") {
    auto rep = maximal_solve(cfg, bg);
    REQUIRE(rep.converged);
    const double sup = (st.u - rep.u).sup_norm();
    INFO("sup |u_pert - u_monotone| = " << sup);
    CHECK(sup <= 1e-5);
  }

  SECTION("rescaled comparison against the generating profile") {
    const double d = 0.1;
    const double self = rescaled_compare(st, ctx, psi, d);
    INFO("self comparison = " << self);
    CHECK(self <= eps * eps * eps * st.v.sup_norm() + 1e-6);

    // the maximal solution rescales to psi as well, tighter for smaller eps
    auto rep = maximal_solve(cfg, bg);
    const double s1 = rescaled_compare(rep.v, bg, psi, eps, d, cut.center);
    CHECK(s1 <= 0.05);
  }
}

TEST_CASE("domain guard fires when the cutoff outruns the profile",
          "[perturbative]") {
  const auto& psi = shared_psi();
  Cutoff cut;
  cut.delta = 0.2;
  Grid g(64);
  CHECK_THROWS_AS(PerturbContext(psi, 0.008, cut, g), PlanarDomainTooSmall);
}
