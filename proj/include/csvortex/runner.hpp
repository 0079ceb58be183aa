#pragma once

// Pipeline orchestration behind the CLI: solve/sweep/spectrum/construct/check
// runs, their file outputs, and the exit-code contract
//   0 ok, 1 CheckFailed, 2 ConfigInvalid, 3 SolveFailed.

#include <atomic>
#include <chrono>
#include <iostream>
#include <thread>

#include "csvortex/config.hpp"
#include "csvortex/diagnostics.hpp"
#include "csvortex/io.hpp"
#include "csvortex/perturbative.hpp"
#include "csvortex/subsolution.hpp"

namespace csvortex {

enum class ExitCode : int { Ok = 0, CheckFailed = 1, BadConfig = 2, SolveFailed = 3 };

namespace runner_detail {

inline std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

inline void write_residual_csv(const std::filesystem::path& path,
                               const SolveReport& rep) {
  CsvWriter csv(path, {"iteration", "residual", "increment"});
  for (std::size_t k = 0; k < rep.residual_history.size(); ++k)
    csv.row({static_cast<double>(k), rep.residual_history[k],
             k < rep.increment_history.size() ? rep.increment_history[k] : 0.0});
}

/// Solve one epsilon with the configured solver; may throw solver errors.
inline SolveReport dispatch_solve(const ExperimentConfig& cfg, double eps,
                                  const TorusBackground& bg) {
  const Grid g = bg.grid;
  switch (cfg.solver) {
    case SolverKind::Monotone: {
      MonotoneSettings s;
      s.kappa = cfg.kappa;
      s.tol_sup = cfg.solver_tol;
      s.max_iter = cfg.max_iter;
      return maximal_solve(bg.cfg, bg, s);
    }
    case SolverKind::Newton: {
      NewtonSettings s;
      s.tol_res = cfg.solver_tol;
      s.krylov_tol = cfg.krylov_tol;
      return newton_solve(Field(g), bg, eps, s);
    }
    case SolverKind::Perturbative: {
      if (bg.cfg.count() != 1)
        throw ConfigInvalid(
            "perturbative solver drives a single collapsing cluster; give one "
            "vortex (its multiplicity is the profile strength)");
      RadialPsi psi(cfg.planar_alpha > 0 ? cfg.planar_alpha
                                         : bg.cfg.multiplicities[0],
                    40.0);
      Cutoff cut;
      cut.delta = cfg.cutoff_delta;
      cut.center = bg.cfg.points[0];
      PerturbContext ctx(psi, eps, cut, g);
      PerturbState st = contraction_solve(ctx, cfg.solver_tol, cfg.max_iter);
      SolveReport rep;
      rep.v = Field(g);
      for (std::size_t k = 0; k < rep.v.values().size(); ++k) {
        const double ew = std::max(ctx.exp_w().values()[k], 1e-300);
        const double e0 = std::max(bg.exp_u0.values()[k], 1e-300);
        rep.v.values()[k] = std::log(ew) - std::log(e0) +
                            eps * eps * eps * st.v.values()[k];
      }
      rep.u = st.u;
      rep.mean_d = mean(rep.v);
      rep.converged = true;
      rep.residual_history = st.residual_history;
      rep.increment_history = st.increment_history;
      rep.diagnostics["contraction_iterations"] = st.iterations;
      rep.diagnostics["contraction_ratio"] = st.contraction_ratio;
      rep.classification = classify_dichotomy(rep, bg);
      return rep;
    }
  }
  throw std::logic_error("dispatch_solve: unreachable");
}

/// Run the configured diagnostic checks; returns pass/fail, fills json, and
/// appends structured rows to the run-level diagnostics CSV (plus the
/// dedicated pohozaev table).
inline bool run_checks(const ExperimentConfig& cfg, double eps,
                       const TorusBackground& bg, const SolveReport& rep,
                       nlohmann::json& out, CsvWriter* diag_csv = nullptr,
                       CsvWriter* pohozaev_csv = nullptr) {
  bool all_ok = true;
  const int N = bg.cfg.total_multiplicity();
  auto emit = [&](const std::string& check, const std::string& metric,
                  double value, bool pass) {
    if (diag_csv)
      diag_csv->text_row({CsvWriter::num(eps), check, metric,
                          CsvWriter::num(value), pass ? "1" : "0"});
  };
  for (const std::string& check : cfg.checks) {
    nlohmann::json j;
    bool ok = true;
    if (check == "flux") {
      const double f = flux(rep, bg, eps);
      j["value"] = f;
      j["expected"] = kFourPi * N;
      if (N > 0) {
        j["rel_error"] = std::abs(f - kFourPi * N) / (kFourPi * N);
        ok = j["rel_error"].get<double>() <= cfg.flux_rel_tol;
      } else {
        ok = std::abs(f) <= 1e-10;
      }
      const double share = flux_localization(rep, bg, eps);
      j["localized_share"] = share;
      emit("flux", "value", f, ok);
      emit("flux", "localized_share", share, ok);
    } else if (check == "pohozaev") {
      auto part = classify_clusters(bg.cfg, cfg.cluster_threshold);
      auto rows = nlohmann::json::array();
      for (const auto& cluster : part.clusters) {
        nlohmann::json r;
        double separation = 0.0;
        for (std::size_t a = 0; a < cluster.size(); ++a)
          for (std::size_t b = a + 1; b < cluster.size(); ++b)
            separation = std::max(
                separation, torus_dist(bg.cfg.points[cluster[a]],
                                       bg.cfg.points[cluster[b]]) / eps);
        try {
          auto res = pohozaev(rep, bg, eps, cfg.pohozaev_radius, cluster);
          r["lhs"] = res.lhs;
          r["rhs"] = res.rhs;
          r["gap"] = res.gap;
          r["l"] = res.cluster_size;
          r["gradient_term"] = res.gradient_term;
          if (res.gap > cfg.pohozaev_gap_tol) ok = false;
          if (pohozaev_csv)
            pohozaev_csv->row({res.lhs, res.rhs, res.gap, eps,
                               static_cast<double>(res.cluster_size), separation});
          emit("pohozaev", "gap", res.gap, res.gap <= cfg.pohozaev_gap_tol);
        } catch (const ClusterNotIsolated& e) {
          r["skipped"] = e.what();
        }
        rows.push_back(r);
      }
      j["clusters"] = rows;
    } else if (check == "decay") {
      auto table = exterior_decay(rep, bg, eps, cfg.decay_radii);
      auto rows = nlohmann::json::array();
      double prev = 1e300;
      for (const auto& row : table) {
        rows.push_back({{"radius_factor", row.radius_factor},
                        {"sup_outside", row.sup_outside}});
        if (row.sup_outside > prev) ok = false;
        prev = row.sup_outside;
        emit("decay", "sup_outside_R" + std::to_string(row.radius_factor),
             row.sup_outside, ok);
      }
      j["table"] = rows;
    } else if (check == "dichotomy") {
      j["classification"] = to_string(rep.classification);
      j["mean_d"] = rep.mean_d;
      ok = rep.classification == Classification::Topological;
      emit("dichotomy", "mean_d", rep.mean_d, ok);
    } else if (check == "spectrum") {
      LinearizedOperator L(bg, rep.v, eps);
      try {
        auto pair = smallest_eigenvalue(L, 1e-6);
        j["lambda_min"] = pair.lambda;
        j["lambda_min_eps2"] = pair.lambda * eps * eps;
        j["eigen_residual"] = pair.residual;
        emit("spectrum", "lambda_min", pair.lambda, ok);
      } catch (const IterationStalled& e) {
        j["stalled"] = e.what();
        ok = false;
        emit("spectrum", "lambda_min",
             std::numeric_limits<double>::quiet_NaN(), false);
      }
    } else if (check == "uniqueness") {
      auto probe = uniqueness_probe(bg.cfg, bg, eps, cfg.uniqueness_trials,
                                    cfg.seed, rep);
      j["verdict"] =
          probe.verdict == UniquenessVerdict::Unique ? "unique" : "ambiguous";
      j["converged_trials"] = probe.converged_trials;
      j["worst_sup_diff"] = probe.worst_sup_diff;
      j["lambda_min"] = probe.lambda_min;
      ok = probe.verdict == UniquenessVerdict::Unique;
      emit("uniqueness", "worst_sup_diff", probe.worst_sup_diff, ok);
      emit("uniqueness", "lambda_min", probe.lambda_min, ok);
    }
    j["pass"] = ok;
    out[check] = j;
    all_ok = all_ok && ok;
  }
  return all_ok;
}

inline nlohmann::json manifest(const std::filesystem::path& config_path,
                               double wall_seconds) {
  nlohmann::json m;
  m["config_hash"] = config_hash(config_path);
  m["version"] = "csvortex 1.0.0";
  m["wall_seconds"] = wall_seconds;
  return m;
}

}  // namespace runner_detail

/// `solve` and the epsilon-list sweep behind it.
inline ExitCode run_solve(const ExperimentConfig& cfg,
                          const std::filesystem::path& config_path) {
  namespace rd = runner_detail;
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  nlohmann::json summary;
  summary["runs"] = nlohmann::json::array();
  ExitCode code = ExitCode::Ok;

  std::optional<CsvWriter> diag_csv, poh_csv;
  if (!cfg.checks.empty()) {
    diag_csv.emplace(cfg.output_dir / "diagnostics.csv",
                     std::vector<std::string>{"epsilon", "check", "metric",
                                              "value", "pass"});
    if (std::find(cfg.checks.begin(), cfg.checks.end(), "pohozaev") !=
        cfg.checks.end())
      poh_csv.emplace(cfg.output_dir / "pohozaev.csv",
                      std::vector<std::string>{"lhs", "rhs", "gap", "eps", "l",
                                               "separation"});
  }

  for (double eps : cfg.epsilon) {
    nlohmann::json run;
    run["epsilon"] = eps;
    run["n"] = cfg.grid_n;
    const Grid g(cfg.grid_n);
    auto vort = cfg.vortices(eps);
    auto bg = build_background(vort, g);
    if (!bg.resolution_ok) {
      run["resolution_warning"] =
          "h > eps/8: vortex cores are under-resolved on this grid";
      std::cerr << "warning: " << run["resolution_warning"].get<std::string>()
                << " (eps = " << eps << ", n = " << cfg.grid_n << ")\n";
    }
    SolveReport rep;
    try {
      rep = rd::dispatch_solve(cfg, eps, bg);
    } catch (const std::exception& e) {
      run["solve_error"] = e.what();
      summary["runs"].push_back(run);
      code = ExitCode::SolveFailed;
      break;
    }
    if (!rep.converged ||
        rep.classification == Classification::NotConverged) {
      run["solve_error"] = "solver did not reach a converged solution";
      for (const auto& [k, v] : rep.diagnostics) run["diagnostics"][k] = v;
      summary["runs"].push_back(run);
      code = ExitCode::SolveFailed;
      break;
    }

    const std::string tag = rd::eps_tag(eps);
    dump_field(rep.u, cfg.output_dir / ("u_eps" + tag), "u", eps);
    dump_field(rep.v, cfg.output_dir / ("v_eps" + tag), "v", eps);
    rd::write_residual_csv(cfg.output_dir / ("residuals_eps" + tag + ".csv"), rep);

    run["classification"] = to_string(rep.classification);
    run["mean_d"] = rep.mean_d;
    run["iterations"] = rep.residual_history.size();
    nlohmann::json checks;
    const bool ok =
        rd::run_checks(cfg, eps, bg, rep, checks,
                       diag_csv ? &*diag_csv : nullptr,
                       poh_csv ? &*poh_csv : nullptr);
    run["checks"] = checks;
    summary["runs"].push_back(run);
    if (!ok && code == ExitCode::Ok) code = ExitCode::CheckFailed;
  }

  summary["all_passed"] = (code == ExitCode::Ok);
  {
    std::ofstream js(cfg.output_dir / "summary.json");
    js << summary.dump(2) << "\n";
  }
  {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream js(cfg.output_dir / "manifest.json");
    js << runner_detail::manifest(config_path, wall).dump(2) << "\n";
  }
  return code;
}

struct SweepRow {
  double epsilon = 0.0;
  double separation_over_eps = 0.0;
  double lambda_min = 0.0;
  double lambda_min_eps2 = 0.0;
  int converged = 0;
};

/// `sweep --param epsilon|separation --values ...`: eigenvalue probe per
/// point, dispatched on a worker pool, merged in parameter order.
inline ExitCode run_sweep(const ExperimentConfig& cfg,
                          const std::filesystem::path& config_path,
                          const std::string& param,
                          const std::vector<double>& values) {
  const auto t0 = std::chrono::steady_clock::now();
  if (param != "epsilon" && param != "separation")
    throw ConfigInvalid("sweep param must be 'epsilon' or 'separation'");
  if (values.empty()) throw ConfigInvalid("sweep values list is empty");
  for (double v : values)
    if (!(v > 0.0)) throw ConfigInvalid("sweep values must be positive");
  std::filesystem::create_directories(cfg.output_dir);

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= values.size()) return;
      SweepRow row;
      double eps;
      VortexConfiguration vort = VortexConfiguration::empty(1.0);
      if (param == "epsilon") {
        eps = values[k];
        vort = cfg.vortices(eps);
        if (vort.count() == 2)
          row.separation_over_eps =
              torus_dist(vort.points[0], vort.points[1]) / eps;
      } else {
        eps = cfg.epsilon.front();
        const double c = values[k];  // separation in units of eps
        vort = VortexConfiguration(
            {{0.5 - 0.5 * c * eps, 0.5}, {0.5 + 0.5 * c * eps, 0.5}}, {1, 1}, eps);
        row.separation_over_eps = c;
      }
      row.epsilon = eps;
      try {
        Grid g(cfg.grid_n);
        auto bg = build_background(vort, g);
        MonotoneSettings ms;
        ms.kappa = cfg.kappa;
        ms.tol_sup = std::max(cfg.solver_tol, 1e-8);
        ms.max_iter = cfg.max_iter;
        auto rep = maximal_solve(vort, bg, ms);
        if (rep.converged) {
          LinearizedOperator L(bg, rep.v, eps);
          auto pair = smallest_eigenvalue(L, 1e-6);
          row.lambda_min = pair.lambda;
          row.lambda_min_eps2 = pair.lambda * eps * eps;
          row.converged = 1;
        }
      } catch (const std::exception&) {
        row.converged = 0;
        row.lambda_min = std::numeric_limits<double>::quiet_NaN();
        row.lambda_min_eps2 = row.lambda_min;
      }
      rows[k] = row;
    }
  };
  const unsigned pool = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()),
      static_cast<unsigned>(values.size()));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < pool; ++t) threads.emplace_back(work);
  for (auto& th : threads) th.join();

  CsvWriter csv(cfg.output_dir / "sweep.csv",
                {"epsilon", "separation_over_eps", "lambda_min",
                 "lambda_min_times_eps2", "converged_flag"});
  bool all_conv = true;
  for (const auto& r : rows) {
    csv.row({r.epsilon, r.separation_over_eps, r.lambda_min, r.lambda_min_eps2,
             static_cast<double>(r.converged)});
    all_conv = all_conv && r.converged;
  }
  {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream js(cfg.output_dir / "manifest.json");
    js << runner_detail::manifest(config_path, wall).dump(2) << "\n";
  }
  return all_conv ? ExitCode::Ok : ExitCode::SolveFailed;
}

/// `check`: diagnostics on previously saved dumps, no solving.
inline ExitCode run_check(const ExperimentConfig& cfg,
                          const std::filesystem::path& config_path) {
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json summary;
  summary["runs"] = nlohmann::json::array();
  ExitCode code = ExitCode::Ok;
  for (double eps : cfg.epsilon) {
    const std::string tag = runner_detail::eps_tag(eps);
    LoadedField u, v;
    try {
      u = load_field(cfg.output_dir / ("u_eps" + tag));
      v = load_field(cfg.output_dir / ("v_eps" + tag));
    } catch (const std::exception& e) {
      throw ConfigInvalid(std::string("check: ") + e.what());
    }
    Grid g(u.field.n());
    auto bg = build_background(cfg.vortices(eps), g);
    SolveReport rep;
    rep.u = u.field;
    rep.v = v.field;
    rep.mean_d = mean(rep.v);
    rep.converged = true;
    rep.classification = classify_dichotomy(rep, bg);
    nlohmann::json run;
    run["epsilon"] = eps;
    nlohmann::json checks;
    const bool ok = runner_detail::run_checks(cfg, eps, bg, rep, checks);
    run["checks"] = checks;
    summary["runs"].push_back(run);
    if (!ok) code = ExitCode::CheckFailed;
  }
  summary["all_passed"] = (code == ExitCode::Ok);
  {
    std::ofstream js(cfg.output_dir / "check_summary.json");
    js << summary.dump(2) << "\n";
  }
  {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream js(cfg.output_dir / "manifest.json");
    js << runner_detail::manifest(config_path, wall).dump(2) << "\n";
  }
  return code;
}

/// `shoot`: one radial profile as CSV rows (r, u, du).
inline ExitCode run_shoot(double alpha, double s, double rmax, std::ostream& os) {
  RadialProfile p = shoot(alpha, s, rmax);
  os << "r,u,du\n";
  char buf[96];
  for (std::size_t k = 0; k < p.r.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.r[k], p.u[k], p.du[k]);
    os << buf;
  }
  std::cerr << "outcome: " << to_string(p.outcome)
            << "  flux: " << p.flux_cum[p.separatrix_end()] << "\n";
  return ExitCode::Ok;
}

/// `beta`: tabulate beta(s) on a log-spaced grid of s values.
inline ExitCode run_beta(double smin, double smax, int count, std::ostream& os) {
  if (!(smin < smax) || smax >= 0.0 || count < 2)
    throw ConfigInvalid("beta: need smin < smax < 0 and count >= 2");
  os << "s,beta\n";
  char buf[64];
  double prev = 0.0;
  bool monotone = true;
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / (count - 1);
    // geometric interpolation keeps resolution near s = 0
    const double s = -std::exp(std::log(-smin) + t * (std::log(-smax) - std::log(-smin)));
    const double b = beta(s);
    if (k > 0 && b <= prev) monotone = false;
    prev = b;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s, b);
    os << buf;
  }
  if (!monotone) std::cerr << "warning: sampled beta table is not monotone\n";
  return ExitCode::Ok;
}

}  // namespace csvortex
