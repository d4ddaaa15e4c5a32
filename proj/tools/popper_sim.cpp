#include <iostream>

#include <CLI11.hpp>

#include "popper/cli.hpp"

namespace {

void add_common(CLI::App* cmd, popper::cli::CommonFlags& flags, bool* seedless) {
  cmd->add_option("--out", flags.out, "write the JSON report here instead of stdout");
  cmd->add_option("--csv", flags.csv, "also write CSV rows to this path");
  cmd->add_flag("--oracle", flags.oracle, "run the grid oracle alongside the closed forms");
  cmd->add_option("--grid-n", flags.grid_n, "oracle points per axis (power of two)");
  cmd->add_flag("--seedless", *seedless, "accepted for compatibility; every computation is deterministic");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace popper::cli;
  CLI::App app{"Entangled two-particle slit experiments: closed forms and grid oracle"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  CommonFlags flags;
  bool seedless = false;
  std::string scenario;

  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario, "scenario JSON")->required();
  add_common(run, flags, &seedless);

  SweepFlags sweep;
  auto* sw = app.add_subcommand("sweep", "coincidence FWHM against slit width, as CSV");
  sw->add_option("scenario", scenario, "scenario JSON")->required();
  sw->add_option("--param", sweep.param, "swept parameter")->capture_default_str();
  sw->add_option("--from", sweep.from, "first value (mm)")->required();
  sw->add_option("--to", sweep.to, "last value (mm)")->required();
  sw->add_option("--steps", sweep.steps, "number of rows (>= 2)")->required();
  add_common(sw, flags, &seedless);

  FitFlags fit;
  auto* ft = app.add_subcommand("fit", "infer a^2 from an observed coincidence FWHM");
  ft->add_option("--fwhm", fit.fwhm, "observed FWHM (mm)")->required();
  ft->add_option("--epsilon", fit.epsilon, "Gaussian slit epsilon (mm)")->capture_default_str();
  ft->add_option("--distance,-L", fit.distance, "distance from the virtual slit to the detector (mm)")->required();
  ft->add_option("--lambda-nm", fit.lambda_nm, "wavelength (nm)")->capture_default_str();
  ft->add_option("--branch", fit.branch, "near or far root")->capture_default_str();
  add_common(ft, flags, &seedless);

  SpinFlags spin;
  auto* sp = app.add_subcommand("spin", "spin-1 pair distributions");
  sp->add_option("--alpha", spin.alpha, "amplitude of |+1,-1> and |-1,+1>");
  sp->add_option("--beta", spin.beta, "amplitude of |0,0>");
  sp->add_option("--preset", spin.preset, "named state: ninety (alias eq2), 90% of pairs in |0,0>");
  add_common(sp, flags, &seedless);

  auto* oc = app.add_subcommand("oracle-check", "run a scenario with the oracle and compare");
  oc->add_option("scenario", scenario, "scenario JSON")->required();
  add_common(oc, flags, &seedless);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return cmd_run(scenario, flags, std::cout, std::cerr);
  if (sw->parsed()) return cmd_sweep(scenario, sweep, flags, std::cout, std::cerr);
  if (ft->parsed()) return cmd_fit(fit, flags, std::cout, std::cerr);
  if (sp->parsed()) return cmd_spin(spin, flags, std::cout, std::cerr);
  return cmd_oracle_check(scenario, flags, std::cout, std::cerr);
}
