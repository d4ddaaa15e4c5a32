#include "popper/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace popper {

namespace {

double fwhm_of(GaussianParam g) { return fwhm_from_width(intensity_width(g)); }

bool oracle_requested(const Scenario& s, const OracleOptions& o) { return o.enabled || s.oracle.has_value(); }

oracle::GridSpec grid_for(const Scenario& s, double flight, double min_feature, const OracleOptions& o) {
  if (!(s.a > 0.0)) throw ConfigError("the grid oracle needs a > 0");
  std::optional<std::size_t> forced = o.grid_n;
  if (!forced && s.oracle) forced = s.oracle->n;
  if (s.oracle && s.oracle->extent) {
    if (!forced) throw ConfigError("oracle.extent_mm needs oracle.n as well");
    oracle::GridSpec g{*forced, *s.oracle->extent};
    g.validate();
    if (g.n > oracle::max_grid_points()) {
      throw ResolutionError("grid n=" + std::to_string(g.n) + " exceeds POPPER_SIM_MAX_GRID");
    }
    return g;
  }
  return oracle::auto_grid(s.a, s.omega, flight, min_feature, s.params, forced);
}

double norm_of(const oracle::Amplitude1D& amp) {
  double sum = 0.0;
  for (const cplx& c : amp.values) sum += std::norm(c);
  return sum * amp.dy;
}

oracle::Amplitude1D sampled_gaussian(double epsilon, std::size_t n, double dy) {
  oracle::Amplitude1D amp{std::vector<cplx>(n), dy, 1.0};
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = amp.coordinate(j);
    const double v = std::exp(-y * y / (epsilon * epsilon));
    amp.values[j] = v;
    sum += v * v;
  }
  const double s = 1.0 / std::sqrt(sum * dy);
  for (cplx& c : amp.values) c *= s;
  return amp;
}

}  // namespace

void Scenario::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("a must be >= 0");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  if (!(L1 >= 0.0) || !(L2 >= 0.0)) throw ConfigError("L1 and L2 must be >= 0");
  if (slit.kind != SlitKind::open && !(slit.width > 0.0)) throw ConfigError("slit width must be positive");
}

double Scenario::effective_distance() const { return lens ? L2 : 2.0 * L1 + L2; }

std::optional<double> Estimate::relative_delta() const {
  if (!analytic || !oracle) return std::nullopt;
  return (*oracle - *analytic) / *analytic;
}

double virtual_slit_fwhm(double epsilon, double a, double distance, const PhysParams& params) {
  const double s2 = epsilon * epsilon + a * a;
  if (!(s2 > 0.0)) throw DomainError("virtual slit needs eps^2 + a^2 > 0");
  const double lam_d = params.reduced_wavelength() * distance;
  return fwhm_from_width(std::sqrt(s2 + lam_d * lam_d / s2));
}

FitResult fit_sigma_from_width(double fwhm_observed, double epsilon, double L, const PhysParams& params,
                               FitBranch branch) {
  if (!(fwhm_observed > 0.0)) throw DomainError("observed FWHM must be positive");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  if (!(L > 0.0)) throw DomainError("fit distance must be positive");
  const double w = fwhm_observed / kFwhmPerWidth;
  const double w2 = w * w;
  const double lam_l = params.reduced_wavelength() * L;
  const double disc = w2 * w2 - 4.0 * lam_l * lam_l;
  if (disc < 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "FWHM %.6g mm is below the diffraction floor %.6g mm at L = %.6g mm",
                  fwhm_observed, kFwhmPerWidth * std::sqrt(2.0 * lam_l), L);
    throw UnreachableWidth(buf);
  }
  const double root = std::sqrt(disc);
  FitResult r;
  r.discriminant = disc;
  // Product of the s^2 roots is (Lambda L)^2; take the small one from it to avoid cancellation.
  const double s2_far = 0.5 * (w2 + root);
  const double s2_near = lam_l * lam_l / s2_far;
  r.s_near = std::sqrt(s2_near);
  r.s_far = std::sqrt(s2_far);
  r.branch = branch;
  const double s2 = branch == FitBranch::near ? s2_near : s2_far;
  r.s = std::sqrt(s2);
  r.a2 = s2 - epsilon * epsilon;
  // A perfectly correlated source lands on a2 = 0 up to rounding; keep it rather than reject it.
  if (r.a2 < 0.0 && r.a2 > -1e-12 * s2) r.a2 = 0.0;
  if (r.a2 < 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "slit epsilon %.6g mm exceeds the inferred localization s = %.6g mm", epsilon,
                  r.s);
    throw SlitWiderThanLocalization(buf);
  }
  return r;
}

double match_epsilon_from_fwhm(double fwhm, double L, const PhysParams& params) {
  return fit_sigma_from_width(fwhm, 0.0, L, params).s_near;
}

WidthReport run_kim_shih(const Scenario& s, const OracleOptions& options) {
  if (!s.lens) throw ConfigError("scenario '" + s.name + "' has no lens; the Kim-Shih run needs one");
  s.validate();
  const LensConfig& lens = *s.lens;
  const bool open = s.slit.kind == SlitKind::open;
  const double eps = open ? 0.0 : s.slit.gaussian_epsilon();
  const PropagationLeg to_detector(lens.ghost_image_distance() + s.L2);

  WidthReport r;
  r.scenario = s.name;
  r.epsilon = eps;
  r.effective_distance = s.effective_distance();
  if (s.a > 0.0) r.beam_fwhm.analytic = fwhm_from_width(beam_width(make_epr_state(s.a, s.omega), PropagationLeg(s.L2), s.params));
  if (open) {
    r.coincidence_fwhm.analytic = r.beam_fwhm.analytic;
  } else {
    const GaussianParam at_detector = lens_ghost_param(s.slit, s.a, lens, to_detector, s.params);
    r.coincidence_fwhm.analytic = fwhm_of(at_detector);
    r.virtual_slit_fwhm = r.coincidence_fwhm.analytic;
    r.virtual_slit_distance = back_propagation_distance(at_detector, s.params);
    r.ghost_image_width = Estimate{intensity_width(lens_ghost_param(
                                       s.slit, s.a, lens, PropagationLeg(lens.ghost_image_distance()), s.params)),
                                   std::nullopt};
    r.real_slit_fwhm = Estimate{
        fwhm_of(propagate_conditional(GaussianParam(cplx(eps * eps, 0.0)), PropagationLeg(s.L2), s.params)),
        std::nullopt};
  }

  if (oracle_requested(s, options)) {
    // The lens relays the slit-A plane onto slit B: condition the source state directly.
    const auto grid = grid_for(s, 0.0, open ? s.a : std::min(eps, s.a), options);
    const auto state = oracle::build_grid_state(s.a, s.omega, grid);
    GridReport g{grid.n, grid.extent, std::abs(state.norm() - 1.0), std::nullopt, false};
    r.beam_fwhm.oracle = oracle::widths(oracle::marginal_particle2(state, s.L2, s.params)).fwhm;
    if (open) {
      r.coincidence_fwhm.oracle = r.beam_fwhm.oracle;
    } else {
      const auto conditional = oracle::condition(state, oracle::Aperture::gaussian(eps));
      g.coincidence_fraction = conditional.weight;
      r.ghost_image_width->oracle = oracle::widths(conditional).gaussian_equiv_w;
      const auto at_detector = oracle::propagate(conditional, s.L2, s.params);
      g.norm_drift = std::max(g.norm_drift, std::abs(norm_of(at_detector) - 1.0));
      const auto w = oracle::widths(at_detector);
      r.coincidence_fwhm.oracle = w.fwhm;
      g.multimodal = w.multimodal;
      const auto real = oracle::propagate(sampled_gaussian(eps, grid.n, grid.step()), s.L2, s.params);
      r.real_slit_fwhm->oracle = oracle::widths(real).fwhm;
    }
    r.grid = g;
  }

  if (s.observed_coincidence_fwhm && !open) {
    r.fitted = fit_sigma_from_width(*s.observed_coincidence_fwhm, eps, s.L2, s.params);
  }
  return r;
}

WidthReport run_popper_freespace(const Scenario& s, const OracleOptions& options) {
  if (s.lens) throw ConfigError("scenario '" + s.name + "' has a lens; use the Kim-Shih run");
  s.validate();
  if (!(s.a > 0.0)) throw ConfigError("free-space scenario needs a > 0");
  const bool open = s.slit.kind == SlitKind::open;
  const double eps = open ? 0.0 : s.slit.gaussian_epsilon();
  const EprState source = make_epr_state(s.a, s.omega);

  WidthReport r;
  r.scenario = s.name;
  r.epsilon = eps;
  r.effective_distance = s.effective_distance();
  r.beam_fwhm.analytic = fwhm_from_width(beam_width(source, PropagationLeg(s.L1 + s.L2), s.params));
  if (open) {
    r.coincidence_fwhm.analytic = r.beam_fwhm.analytic;
  } else {
    const GaussianParam at_slit = condition_on_gaussian_slit(source, SlitSpec::gaussian(eps), PropagationLeg(s.L1), s.params);
    const GaussianParam at_detector = propagate_conditional(at_slit, PropagationLeg(s.L2), s.params);
    r.coincidence_fwhm.analytic = fwhm_of(at_detector);
    r.virtual_slit_fwhm = virtual_slit_fwhm(eps, s.a, r.effective_distance, s.params);
    r.virtual_slit_distance = back_propagation_distance(at_detector, s.params);
    r.real_slit_fwhm = Estimate{
        fwhm_of(propagate_conditional(GaussianParam(cplx(eps * eps, 0.0)), PropagationLeg(s.L2), s.params)),
        std::nullopt};
  }

  if (oracle_requested(s, options)) {
    const auto grid = grid_for(s, s.L1, open ? s.a : std::min(eps, s.a), options);
    const auto state = oracle::build_grid_state(s.a, s.omega, grid);
    const auto evolved = oracle::evolve_spectral(state, s.L1, s.L1, s.params);
    GridReport g{grid.n, grid.extent, std::abs(evolved.norm() - state.norm()), std::nullopt, false};
    r.beam_fwhm.oracle = oracle::widths(oracle::marginal_particle2(evolved, s.L2, s.params)).fwhm;
    if (open) {
      r.coincidence_fwhm.oracle = r.beam_fwhm.oracle;
    } else {
      const auto conditional = oracle::condition(evolved, oracle::Aperture::gaussian(eps));
      g.coincidence_fraction = conditional.weight;
      const auto at_detector = oracle::propagate(conditional, s.L2, s.params);
      g.norm_drift = std::max(g.norm_drift, std::abs(norm_of(at_detector) - 1.0));
      const auto w = oracle::widths(at_detector);
      r.coincidence_fwhm.oracle = w.fwhm;
      g.multimodal = w.multimodal;
      const auto real = oracle::propagate(sampled_gaussian(eps, grid.n, grid.step()), s.L2, s.params);
      r.real_slit_fwhm->oracle = oracle::widths(real).fwhm;
    }
    r.grid = g;
  }

  if (s.observed_coincidence_fwhm && !open) {
    r.fitted = fit_sigma_from_width(*s.observed_coincidence_fwhm, eps, r.effective_distance, s.params);
  }
  return r;
}

WidthReport run_scenario(const Scenario& s, const OracleOptions& options) {
  return s.lens ? run_kim_shih(s, options) : run_popper_freespace(s, options);
}

std::vector<CurvePoint> run_strekalov_sweep(const Scenario& s, const std::vector<double>& slit_full_widths,
                                            const OracleOptions& options) {
  s.validate();
  if (!(s.a > 0.0)) throw ConfigError("sweep needs a > 0");
  std::vector<double> widths = slit_full_widths;
  std::sort(widths.begin(), widths.end());
  std::vector<double> eps(widths.size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] > 0.0)) throw DomainError("slit width must be positive");
    const SlitConvention convention =
        s.slit.kind == SlitKind::rectangular ? s.slit.convention : SlitConvention::half_width;
    eps[i] = SlitSpec::rectangular(widths[i], convention).gaussian_epsilon();
  }

  const double D = s.effective_distance();
  const EprState source = make_epr_state(s.a, s.omega);
  const double beam = fwhm_from_width(beam_width(source, PropagationLeg(s.L1 + s.L2), s.params));
  std::vector<CurvePoint> curve;
  curve.reserve(widths.size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    CurvePoint p;
    p.slit_full_width = widths[i];
    p.fwhm_analytic = virtual_slit_fwhm(eps[i], s.a, D, s.params);
    p.beam_fwhm_analytic = beam;
    if (s.observed_coincidence_fwhm) {
      try {
        p.fitted = fit_sigma_from_width(*s.observed_coincidence_fwhm, eps[i], D, s.params);
      } catch (const DomainError& e) {
        p.status = std::string("fit_failed: ") + e.what();
      }
    }
    curve.push_back(std::move(p));
  }

  if (oracle_requested(s, options) && !widths.empty()) {
    const double finest = *std::min_element(eps.begin(), eps.end());
    const auto grid = grid_for(s, s.L1, std::min(finest, s.a), options);
    const auto evolved =
        oracle::evolve_spectral(oracle::build_grid_state(s.a, s.omega, grid), s.L1, s.L1, s.params);
    const double beam_oracle = oracle::widths(oracle::marginal_particle2(evolved, s.L2, s.params)).fwhm;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      curve[i].beam_fwhm_oracle = beam_oracle;
      try {
        const auto conditional = oracle::condition(evolved, oracle::Aperture::gaussian(eps[i]));
        curve[i].fwhm_oracle = oracle::widths(oracle::propagate(conditional, s.L2, s.params)).fwhm;
      } catch (const ResolutionError& e) {
        curve[i].status = std::string("oracle_failed: ") + e.what();
      }
    }
  }
  return curve;
}

DoubleSlitReport run_ghost_double_slit(double a, double omega, double slit_width, double separation, double L1,
                                       double d1, double L2, const PhysParams& params,
                                       std::optional<oracle::GridSpec> grid) {
  const auto slit = oracle::Aperture::double_slit(slit_width, separation);
  DoubleSlitReport r;
  r.grid = grid ? *grid : oracle::auto_grid(a, omega, L1, 0.5 * slit_width, params);
  const auto state = oracle::evolve_spectral(oracle::build_grid_state(a, omega, r.grid), L1, L1, params);
  r.fringes = oracle::ghost_double_slit(state, slit, d1, L2, params);
  r.expected_spacing = params.wavelength() * (2.0 * L1 + L2) / separation;
  return r;
}

}  // namespace popper
