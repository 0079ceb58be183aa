// Monotone (maximal-solution) scheme: vacuum case, pointwise monotonicity,
// the verified subsolution floor, flux of the converged solution, and the
// dichotomy classifier.

#include <catch2/catch.hpp>

#include "csvortex/monotone.hpp"
#include "csvortex/newton.hpp"
#include "csvortex/subsolution.hpp"

using namespace csvortex;

TEST_CASE("vacuum solve returns u = 0 after one iteration", "[monotone]") {
  Grid g(32);
  auto cfg = VortexConfiguration::empty(0.05);
  auto bg = build_background(cfg, g);
  auto rep = maximal_solve(cfg, bg);
  CHECK(rep.converged);
  CHECK(rep.increment_history.size() == 1);
  CHECK(rep.u.sup_norm() == 0.0);
  CHECK(rep.classification == Classification::Topological);
}

TEST_CASE("single vortex solve: monotone iterates and quantized flux", "[monotone]") {
  Grid g(128);
  const double eps = 0.05;
  auto cfg = VortexConfiguration::single({0.5, 0.5}, 1, eps);
  auto bg = build_background(cfg, g);
  auto rep = maximal_solve(cfg, bg);
  REQUIRE(rep.converged);
  CHECK(rep.classification == Classification::Topological);

  SECTION("start iterate was a verified discrete supersolution") {
    CHECK(rep.diagnostics.at("start_residual_max") < 0.0);
  }

  SECTION("flux quantization") {
    Field E = nonlinear_exp(bg, rep.v);
    double flux = 0.0;
    for (double e : E.values()) flux += e * (1.0 - e);
    flux *= g.h * g.h / (eps * eps);
    CHECK(flux == Approx(kFourPi).epsilon(1e-3));
  }

  SECTION("solution is negative and small away from the core") {
    CHECK(rep.u.max() < 1e-6);
    CHECK(rep.diagnostics.at("dichotomy_sup_outside") < 0.01);
  }

  SECTION("residual history decreases after the first entries") {
    const auto& h = rep.residual_history;
    REQUIRE(h.size() > 10);
    for (std::size_t i = 5; i + 1 < h.size(); ++i) CHECK(h[i + 1] <= h[i] * 1.001);
  }
}

TEST_CASE("kappa below the order-preservation threshold raises NonMonotoneStep",
          "[monotone]") {
  Grid g(64);
  const double eps = 0.05;
  auto cfg = VortexConfiguration::single({0.5, 0.5}, 1, eps);
  auto bg = build_background(cfg, g);
  MonotoneSettings s;
  s.kappa = 0.05 / (eps * eps);  // far below the 2/eps^2 requirement
  CHECK_THROWS_AS(maximal_solve(cfg, bg, s), NonMonotoneStep);
}

TEST_CASE("explicit plateau subsolution", "[monotone]") {
  Grid g(128);
  const double eps = 0.01;
  auto cfg = VortexConfiguration::single({0.5, 0.5}, 1, eps);
  auto bg = build_background(cfg, g);
  auto sub = build_subsolution(bg);

  SECTION("default plateau radius and the mean-zero solve") {
    CHECK(sub.delta == Approx(1.0 / std::sqrt(8.0 * kPi)));
    CHECK(std::abs(integrate(sub.w)) < 1e-10);
    CHECK(!sub.delta_clamped);
  }

  SECTION("both inequalities verified with nonnegative margins") {
    CHECK(sub.margin_inside >= -1e-9 / (eps * eps));
    CHECK(sub.margin_outside >= -1e-9 / (eps * eps));
  }

  SECTION("maximal solution dominates the subsolution") {
    auto bg2 = build_background(VortexConfiguration::single({0.5, 0.5}, 1, 0.05),
                                g);
    auto rep = maximal_solve(bg2.cfg, bg2);
    auto sub2 = build_subsolution(bg2);
    double worst = 1e300;
    for (std::size_t k = 0; k < rep.v.values().size(); ++k)
      worst = std::min(worst, rep.v.values()[k] - sub2.w0.values()[k]);
    CHECK(worst >= -1e-8);
  }

  SECTION("oversized plateau radius is clamped and reported") {
    auto sub2 = build_subsolution(bg, 0.4);
    CHECK(sub2.delta_clamped);
    CHECK(sub2.delta == 0.25);
  }

  SECTION("no subsolution above the critical coupling") {
    auto bg2 = build_background(VortexConfiguration::single({0.5, 0.5}, 1, 0.2),
                                g);
    CHECK_THROWS_AS(build_subsolution(bg2), SubsolutionFailed);
  }
}

TEST_CASE("epsilon-monotonicity of maximal solutions", "[monotone]") {
  Grid g(128);
  const Vec2 p{0.5, 0.5};
  Field prev;
  bool first = true;
  for (double eps : {0.04, 0.06}) {  // increasing eps
    auto cfg = VortexConfiguration::single(p, 1, eps);
    auto bg = build_background(cfg, g);
    auto rep = maximal_solve(cfg, bg);
    REQUIRE(rep.converged);
    if (!first) {
      // u at the smaller eps dominates u at the larger one
      double worst = 1e300;
      for (std::size_t k = 0; k < rep.u.values().size(); ++k)
        worst = std::min(worst, prev.values()[k] - rep.u.values()[k]);
      CHECK(worst >= -1e-6);
    }
    prev = rep.u;
    first = false;
  }
}

TEST_CASE("non-existence above the critical coupling", "[monotone]") {
  Grid g(64);
  const double eps = 0.2;  // above 1/sqrt(16 pi) ~ 0.141
  auto cfg = VortexConfiguration::single({0.5, 0.5}, 1, eps);
  auto bg = build_background(cfg, g);
  MonotoneSettings s;
  s.max_iter = 4000;
  auto run = [&]() -> Classification {
    try {
      auto rep = maximal_solve(cfg, bg, s);
      return rep.classification;
    } catch (const NotConvergedError&) {
      return Classification::NotConverged;
    }
  };
  Classification c = run();
  CHECK((c == Classification::NotConverged ||
         c == Classification::NonTopologicalSuspect));
  // deterministic: the same run classifies identically
  CHECK(run() == c);
}

TEST_CASE("dichotomy classifier on synthetic fields", "[monotone]") {
  Grid g(64);
  const double eps = 0.02;
  auto cfg = VortexConfiguration::single({0.5, 0.5}, 1, eps);
  auto bg = build_background(cfg, g);

  SolveReport rep;
  rep.u = Field(g, 0.0);
  rep.mean_d = 0.0;
  CHECK(classify_dichotomy(rep, bg) == Classification::Topological);

  SolveReport low;
  low.u = Field(g, -10.0);
  low.mean_d = -10.0;
  CHECK(classify_dichotomy(low, bg) == Classification::NonTopologicalSuspect);
}
