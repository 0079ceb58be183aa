// Command-line laboratory for self-dual Chern-Simons vortices on the unit
// torus: config-driven solves and parameter sweeps, radial shooting, the
// perturbative constructor, and diagnostics over saved runs.

#include <CLI11.hpp>

#include "csvortex/runner.hpp"

using namespace csvortex;

namespace {

std::vector<double> parse_csv_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::trim(tok);
    if (tok.empty()) continue;
    out.push_back(detail::parse_real(tok, "--values"));
  }
  return out;
}

int exit_of(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csvortex: Chern-Simons vortex solves on the unit torus"};
  app.require_subcommand(1);

  long long seed_override = -1;
  app.add_option("--seed", seed_override, "override the config seed");

  std::string config_path, param, values_csv;
  double alpha = 1.0, s_value = -1.0, rmax = 30.0, smin = -15.0, smax = -0.1;
  int count = 20;

  auto* solve_cmd = app.add_subcommand("solve", "run the configured solver");
  solve_cmd->add_option("--config", config_path, "experiment config")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "eigenvalue probe over a parameter");
  sweep_cmd->add_option("--config", config_path, "experiment config")->required();
  sweep_cmd->add_option("--param", param, "epsilon | separation")->required();
  sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();

  auto* shoot_cmd = app.add_subcommand("shoot", "one radial profile to stdout");
  shoot_cmd->add_option("--alpha", alpha, "vortex strength at the origin")->required();
  shoot_cmd->add_option("--s", s_value, "shooting parameter (< 0)")->required();
  shoot_cmd->add_option("--rmax", rmax, "integration radius")->required();

  auto* beta_cmd = app.add_subcommand("beta", "tabulate the bubble flux beta(s)");
  beta_cmd->add_option("--smin", smin, "most negative s")->required();
  beta_cmd->add_option("--smax", smax, "least negative s")->required();
  beta_cmd->add_option("--count", count, "number of samples")->required();

  auto* spectrum_cmd = app.add_subcommand("spectrum", "solve plus eigenvalue probe");
  spectrum_cmd->add_option("--config", config_path, "experiment config")->required();

  auto* construct_cmd =
      app.add_subcommand("construct", "perturbative constructor run");
  construct_cmd->add_option("--config", config_path, "experiment config")->required();

  auto* check_cmd = app.add_subcommand("check", "diagnostics on saved dumps");
  check_cmd->add_option("--config", config_path, "experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (shoot_cmd->parsed()) return exit_of(run_shoot(alpha, s_value, rmax, std::cout));
    if (beta_cmd->parsed()) return exit_of(run_beta(smin, smax, count, std::cout));

    ExperimentConfig cfg = load_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    if (solve_cmd->parsed()) return exit_of(run_solve(cfg, config_path));
    if (sweep_cmd->parsed())
      return exit_of(run_sweep(cfg, config_path, param, parse_csv_values(values_csv)));
    if (spectrum_cmd->parsed()) {
      if (std::find(cfg.checks.begin(), cfg.checks.end(), "spectrum") ==
          cfg.checks.end())
        cfg.checks.push_back("spectrum");
      return exit_of(run_solve(cfg, config_path));
    }
    if (construct_cmd->parsed()) {
      cfg.solver = SolverKind::Perturbative;
      return exit_of(run_solve(cfg, config_path));
    }
    if (check_cmd->parsed()) return exit_of(run_check(cfg, config_path));
  } catch (const ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_of(ExitCode::BadConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_of(ExitCode::SolveFailed);
  }
  return exit_of(ExitCode::BadConfig);
}
