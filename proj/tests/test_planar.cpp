// Planar truncated-box multivortex solves, cross-checked against the radial
// shooting oracle and far-field superposition.

#include <catch2/catch.hpp>

#include "csvortex/planar.hpp"

using namespace csvortex;

TEST_CASE("single vortex on the box reproduces the radial profile", "[planar]") {
  const double R = 30.0;
  const int m = 420;
  auto sol = planar_multivortex_solve({{{0.0, 0.0}, 1}}, R, m);
  RadialPsi oracle(1.0, 40.0);

  SECTION("cross-check against the shooting oracle on r <= R/2") {
    double worst = 0.0;
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        const double r = sol.grid.point(i, j).norm();
        if (r > R / 2 || r < 1e-9) continue;
        worst = std::max(worst, std::abs(sol.psi.at(i, j) - oracle.value(r)));
      }
    INFO("sup diff = " << worst);
    CHECK(worst <= 1e-4);
  }

  SECTION("psi is negative inside and zero on the boundary") {
    for (int i = 0; i <= m; ++i) {
      CHECK(sol.psi.at(i, 0) == 0.0);
      CHECK(sol.psi.at(i, m) == 0.0);
      CHECK(sol.psi.at(0, i) == 0.0);
      CHECK(sol.psi.at(m, i) == 0.0);
    }
    double interior_max = -1e300, inner_max = -1e300;
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) {
        interior_max = std::max(interior_max, sol.psi.at(i, j));
        if (sol.grid.point(i, j).norm() < 2.0 * R / 3.0)
          inner_max = std::max(inner_max, sol.psi.at(i, j));
      }
    CHECK(interior_max <= 1e-12);  // corner values sit at rounding level
    CHECK(inner_max < 0.0);
  }

  SECTION("grid-symmetry orbits: angular variation at solver accuracy") {
    const int c = m / 2;
    double worst = 0.0;
    for (int di = 1; di < m / 2 - 1; di += 7)
      for (int dj = di + 1; dj < m / 2 - 1; dj += 9) {
        const double vals[8] = {
            sol.psi.at(c + di, c + dj), sol.psi.at(c - di, c + dj),
            sol.psi.at(c + di, c - dj), sol.psi.at(c - di, c - dj),
            sol.psi.at(c + dj, c + di), sol.psi.at(c - dj, c + di),
            sol.psi.at(c + dj, c - di), sol.psi.at(c - dj, c - di)};
        double mn = vals[0], mx = vals[0];
        for (double x : vals) {
          mn = std::min(mn, x);
          mx = std::max(mx, x);
        }
        worst = std::max(worst, mx - mn);
      }
    CHECK(worst <= 1e-6);
  }

  SECTION("exponential decay fit with the linearized rate") {
    CHECK(sol.decay_c2 > 0.5);
    CHECK(sol.decay_c2 < 1.5);
    CHECK(sol.decay_c1 > 0.0);
  }

  SECTION("export writes the field and its metadata") {
    const auto stem =
        std::filesystem::temp_directory_path() / "csvortex_planar_dump";
    dump_planar_solution(sol, stem);
    std::ifstream js(stem.string() + ".json");
    REQUIRE(js.good());
    auto meta = nlohmann::json::parse(js);
    CHECK(meta.at("m").get<int>() == m);
    CHECK(meta.at("decay_fit").at("c2").get<double>() == sol.decay_c2);
    std::ifstream bin(stem.string() + ".f64", std::ios::binary | std::ios::ate);
    CHECK(static_cast<std::size_t>(bin.tellg()) ==
          sol.psi.v.size() * sizeof(double));
  }
}

TEST_CASE("two far vortices superpose up to exponentially small terms",
          "[planar]") {
  const double R = 30.0;
  const int m = 420;
  const Vec2 a{-10.0, 0.0}, b{10.0, 0.0};
  auto sol = planar_multivortex_solve({{a, 1}, {b, 1}}, R, m);
  RadialPsi single(1.0, 40.0);
  double worst = 0.0;
  for (int i = 1; i < m; ++i)
    for (int j = 1; j < m; ++j) {
      const Vec2 x = sol.grid.point(i, j);
      const double ra = (x - a).norm(), rb = (x - b).norm();
      if (std::min(ra, rb) > 5.0 || std::min(ra, rb) < 1e-9) continue;
      const double near = (ra < rb) ? single.value(ra) : single.value(rb);
      worst = std::max(worst, std::abs(sol.psi.at(i, j) - near));
    }
  INFO("sup |psi - single profile| near cores = " << worst);
  CHECK(worst <= 1e-2);
}

TEST_CASE("planar solver preconditions", "[planar]") {
  CHECK_THROWS_AS(planar_multivortex_solve({{{0.0, 0.0}, 1}}, 10.0, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(planar_multivortex_solve({{{25.0, 0.0}, 1}}, 30.0, 100),
                  std::invalid_argument);
}

TEST_CASE("radial psi provider is consistent across its branches", "[planar]") {
  RadialPsi psi(1.0, 40.0);
  SECTION("series / interpolation handoff") {
    const double r_lo = 5e-7, r_hi = 2e-6;
    // value and slope are continuous through the profile start
    CHECK(psi.value(r_lo) - 2.0 * std::log(r_lo) ==
          Approx(psi.value(r_hi) - 2.0 * std::log(r_hi)).margin(1e-8));
  }
  SECTION("exp form matches exp of the value") {
    for (double r : {1e-3, 0.5, 3.0, 10.0}) {
      CHECK(psi.exp_value(r) == Approx(std::exp(psi.value(r))).epsilon(1e-10));
    }
    CHECK(psi.exp_value(0.0) == 0.0);
  }
  SECTION("tail continues smoothly") {
    const double rc = psi.r_max();
    CHECK(psi.value(rc * 1.0001) == Approx(psi.value(rc * 0.9999)).margin(1e-6));
    CHECK(psi.tail_c2() > 0.5);
    CHECK(psi.tail_c2() < 1.5);
  }
}
