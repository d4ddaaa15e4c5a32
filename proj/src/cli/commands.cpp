#include "popper/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include "popper/experiments.hpp"
#include "popper/scenario.hpp"
#include "popper/spin_model.hpp"
#include "report.hpp"

namespace popper::cli {

namespace {

using report::Json;

/// Maps the error hierarchy onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ResolutionError& e) {
    err << "resolution error: " << e.what() << '\n';
    return kExitResolution;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

/// Writes via `emit` to `path` when given, else to `fallback`.
void emit_to(const std::optional<std::string>& path, std::ostream& fallback,
             const std::function<void(std::ostream&)>& emit) {
  if (!path) {
    emit(fallback);
    return;
  }
  std::ofstream file(*path);
  if (!file) throw ConfigError("cannot write '" + *path + "'");
  emit(file);
  if (!file) throw ConfigError("write to '" + *path + "' failed");
}

OracleOptions oracle_options(const CommonFlags& flags) { return OracleOptions{flags.oracle, flags.grid_n}; }

Json distribution(const spin::Distribution& p) {
  return Json::array({report::sig9(p[0]), report::sig9(p[1]), report::sig9(p[2])});
}

Json conditionals(const spin::SpinState& state, spin::Axis axis) {
  Json j;
  for (int m : {+1, 0, -1}) {
    const std::string key = m > 0 ? "+1" : std::to_string(m);
    try {
      const auto outcome = spin::condition_on(state, spin::Particle::A, axis, m);
      j[key] = {{"probability", report::sig9(outcome.probability)},
                {"B_z", distribution(spin::marginal_probabilities(outcome.post_state, spin::Particle::B, spin::Axis::z))},
                {"B_x", distribution(spin::marginal_probabilities(outcome.post_state, spin::Particle::B, spin::Axis::x))}};
    } catch (const ImpossibleOutcome&) {
      j[key] = {{"probability", 0.0}, {"B_z", nullptr}, {"B_x", nullptr}};
    }
  }
  return j;
}

}  // namespace

const char* version() { return POPPER_VERSION; }

int cmd_run(const std::string& scenario_path, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario_path);
    const WidthReport r = run_scenario(s, oracle_options(flags));
    const Json doc = report::document(
        Json{{"scenario", report::scenario_echo(s)}, {"results", report::width_report(r, s.outputs)}});
    emit_to(flags.out, out, [&](std::ostream& os) { report::write(os, doc); });
    if (flags.csv) emit_to(flags.csv, out, [&](std::ostream& os) { report::width_csv(os, r); });
    return kExitOk;
  });
}

int cmd_sweep(const std::string& scenario_path, const SweepFlags& sweep, const CommonFlags& flags, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    if (sweep.param != "slit_full_width") throw ConfigError("only --param slit_full_width can be swept");
    if (!(sweep.from > 0.0) || !(sweep.to > sweep.from)) throw ConfigError("sweep bounds need 0 < from < to");
    if (sweep.steps < 2) throw ConfigError("sweep needs steps >= 2");
    const Scenario s = load_scenario(scenario_path);
    std::vector<double> widths(static_cast<std::size_t>(sweep.steps));
    const double step = (sweep.to - sweep.from) / static_cast<double>(sweep.steps - 1);
    for (std::size_t i = 0; i < widths.size(); ++i) widths[i] = sweep.from + step * static_cast<double>(i);
    widths.back() = sweep.to;
    const OracleOptions opts = oracle_options(flags);
    const auto curve = run_strekalov_sweep(s, widths, opts);
    const bool with_oracle = opts.enabled || s.oracle.has_value();
    const bool with_fit = s.observed_coincidence_fwhm.has_value();
    for (const CurvePoint& p : curve) {
      if (p.status != "ok") err << "row " << report::format9(p.slit_full_width) << " mm flagged: " << p.status << '\n';
    }
    emit_to(flags.csv, out, [&](std::ostream& os) { report::curve_csv(os, curve, with_oracle, with_fit); });
    if (flags.out) {
      Json rows = Json::array();
      for (const CurvePoint& p : curve) {
        Json row;
        row["slit_full_width_mm"] = report::sig9(p.slit_full_width);
        row["fwhm_analytic_mm"] = report::sig9(p.fwhm_analytic);
        row["fwhm_oracle_mm"] = report::number_or_null(p.fwhm_oracle);
        row["beam_fwhm_analytic_mm"] = report::number_or_null(p.beam_fwhm_analytic);
        row["beam_fwhm_oracle_mm"] = report::number_or_null(p.beam_fwhm_oracle);
        row["fit"] = p.fitted ? report::fit_result(*p.fitted) : Json(nullptr);
        row["status"] = p.status;
        rows.push_back(row);
      }
      const Json doc = report::document(Json{{"scenario", report::scenario_echo(s)},
                                             {"sweep", {{"param", sweep.param}, {"steps", sweep.steps}}},
                                             {"results", rows}});
      emit_to(flags.out, out, [&](std::ostream& os) { report::write(os, doc); });
    }
    return kExitOk;
  });
}

int cmd_fit(const FitFlags& fit, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    FitBranch branch = FitBranch::near;
    if (fit.branch == "far") {
      branch = FitBranch::far;
    } else if (fit.branch != "near") {
      throw ConfigError("--branch must be near or far");
    }
    const PhysParams params = PhysParams::from_wavelength_nm(fit.lambda_nm);
    const FitResult r = fit_sigma_from_width(fit.fwhm, fit.epsilon, fit.distance, params, branch);
    const Json doc = report::document(Json{{"inputs",
                                            {{"fwhm_observed_mm", report::sig9(fit.fwhm)},
                                             {"epsilon_mm", report::sig9(fit.epsilon)},
                                             {"distance_mm", report::sig9(fit.distance)},
                                             {"lambda_nm", report::sig9(fit.lambda_nm)}}},
                                           {"results", report::fit_result(r)}});
    emit_to(flags.out, out, [&](std::ostream& os) { report::write(os, doc); });
    return kExitOk;
  });
}

int cmd_spin(const SpinFlags& spin_flags, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    double alpha = 0.0;
    double beta = 0.0;
    if (spin_flags.preset) {
      // "eq2" is the interface name other tools already use for the same state.
      if (*spin_flags.preset != "ninety" && *spin_flags.preset != "eq2")
        throw ConfigError("unknown preset '" + *spin_flags.preset + "'");
      if (spin_flags.alpha || spin_flags.beta) throw ConfigError("--preset excludes --alpha/--beta");
      alpha = std::sqrt(0.05);
      beta = std::sqrt(0.9);
    } else {
      if (!spin_flags.alpha || !spin_flags.beta) throw ConfigError("give --alpha and --beta, or --preset ninety");
      alpha = *spin_flags.alpha;
      beta = *spin_flags.beta;
      // Command-line amplitudes are typed to a handful of decimals; accept that rounding and renormalize.
      constexpr double kInputTolerance = 1e-8;
      const double norm2 = 2.0 * alpha * alpha + beta * beta;
      if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kInputTolerance)
        throw DomainError("2*alpha^2 + beta^2 must equal 1 (got " + report::format9(norm2) + ")");
      alpha /= std::sqrt(norm2);
      beta /= std::sqrt(norm2);
    }
    const spin::SpinState state = spin::make_popper_spin_state(alpha, beta);
    Json results;
    results["marginal"] = {
        {"A_z", distribution(spin::marginal_probabilities(state, spin::Particle::A, spin::Axis::z))},
        {"A_x", distribution(spin::marginal_probabilities(state, spin::Particle::A, spin::Axis::x))},
        {"B_z", distribution(spin::marginal_probabilities(state, spin::Particle::B, spin::Axis::z))},
        {"B_x", distribution(spin::marginal_probabilities(state, spin::Particle::B, spin::Axis::x))}};
    results["conditional_on_A_x"] = conditionals(state, spin::Axis::x);
    results["conditional_on_A_z"] = conditionals(state, spin::Axis::z);
    const Json doc = report::document(Json{
        {"state", {{"alpha", report::sig9(alpha)}, {"beta", report::sig9(beta)}, {"basis_order", {1, 0, -1}}}},
        {"results", results}});
    emit_to(flags.out, out, [&](std::ostream& os) { report::write(os, doc); });
    return kExitOk;
  });
}

int cmd_oracle_check(const std::string& scenario_path, const CommonFlags& flags, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    constexpr double kTolerance = 0.02;
    const Scenario s = load_scenario(scenario_path);
    OracleOptions opts = oracle_options(flags);
    opts.enabled = true;
    const WidthReport r = run_scenario(s, opts);
    Json checks = Json::array();
    bool all_pass = true;
    const auto check = [&](const char* name, const std::optional<Estimate>& e) {
      if (!e || !e->relative_delta()) return;
      const double d = *e->relative_delta();
      const bool pass = std::abs(d) <= kTolerance;
      all_pass = all_pass && pass;
      checks.push_back({{"quantity", name}, {"relative_delta", report::sig9(d)}, {"tolerance", kTolerance}, {"pass", pass}});
    };
    check("beam_fwhm", r.beam_fwhm);
    check("coincidence_fwhm", r.coincidence_fwhm);
    check("real_slit_fwhm", r.real_slit_fwhm);
    check("ghost_image_width", r.ghost_image_width);
    const Json doc = report::document(Json{{"scenario", report::scenario_echo(s)},
                                           {"results", report::width_report(r, {})},
                                           {"checks", checks},
                                           {"all_pass", all_pass}});
    emit_to(flags.out, out, [&](std::ostream& os) { report::write(os, doc); });
    if (flags.csv) emit_to(flags.csv, out, [&](std::ostream& os) { report::width_csv(os, r); });
    return kExitOk;
  });
}

}  // namespace popper::cli
