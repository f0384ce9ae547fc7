#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "kgdamp/checks.hpp"
#include "kgdamp/commands.hpp"
#include "kgdamp/config.hpp"

using namespace kgdamp;

int main(int argc, char** argv) {
  CLI::App app{"Damped nonlinear Klein-Gordon simulator"};
  app.require_subcommand(1);

  std::string run_path;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run a simulation from a JSON config");
  run->add_option("config", run_path, "Run config (JSON)")->required();
  run->add_flag("-v,--verbose", verbose, "List every default applied to the config");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Run the cross product of parameter axes");
  sweep->add_option("sweep", sweep_path, "Sweep config (JSON)")->required();

  std::string rate_path;
  auto* rate = app.add_subcommand("rate", "Evaluate the closed-form decay rate");
  rate->add_option("inputs", rate_path, "Rate inputs (JSON)")->required();

  std::string gs_path, gs_out = "ground_state.csv";
  auto* gs = app.add_subcommand("ground-state", "Shoot the radial ground state");
  gs->add_option("model", gs_path, "Nonlinearity block (JSON)")->required();
  gs->add_option("-o,--out", gs_out, "Profile CSV path")->capture_default_str();

  std::string tr_path, tr_out;
  double theta = 0.5, k = 1.0, z_max = 10.0;
  std::optional<double> l;
  int n_points = 1001;
  auto* tr = app.add_subcommand("truncate", "Tabulate the truncated nonlinearity");
  tr->add_option("model", tr_path, "Nonlinearity block (JSON)")->required();
  tr->add_option("--theta", theta, "Growth exponent in (0,1)")->capture_default_str();
  tr->add_option("--k", k, "First-stage radius")->required();
  tr->add_option("--l", l, "Second-stage radius (> k); f_kl = f_k when omitted");
  tr->add_option("--zmax", z_max, "Table range [0, zmax]")->capture_default_str();
  tr->add_option("-n,--points", n_points, "Number of rows")->capture_default_str();
  tr->add_option("-o,--out", tr_out, "CSV path (stdout when omitted)");

  CheckOptions check_opts;
  bool no_quotient = false;
  auto* check = app.add_subcommand("check", "Run the built-in invariant suite");
  check->add_option("--filter", check_opts.filter, "Only checks whose name contains this");
  check->add_flag("--no-sv-quotient", no_quotient,
                  "Replace the difference quotient by f'(midpoint) (mutation test)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      LoadedConfig lc = load_config(run_path);
      if (verbose)
        for (const auto& d : lc.report.defaults_applied) std::cerr << "default: " << d << "\n";
      for (const auto& w : lc.report.warnings) std::cerr << "warning: " << w << "\n";
      return cmd_run(lc.config, std::cerr);
    }
    if (*sweep) return cmd_sweep(load_sweep(sweep_path), std::cerr);
    if (*rate) return cmd_rate(read_json_file(rate_path), std::cout);
    if (*gs) return cmd_ground_state(read_json_file(gs_path), gs_out, std::cout);
    if (*tr) {
      const std::string csv = truncation_csv(read_json_file(tr_path), theta, k, l, z_max, n_points);
      if (tr_out.empty()) {
        std::cout << csv;
      } else {
        write_text_file(tr_out, csv);
      }
      return 0;
    }
    if (*check) {
      check_opts.use_difference_quotient = !no_quotient;
      return cmd_check(check_opts, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
