#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "popper/cli.hpp"

namespace popper::cli::report {

namespace {

bool wanted(const std::vector<std::string>& outputs, const char* key) {
  return outputs.empty() || std::find(outputs.begin(), outputs.end(), key) != outputs.end();
}

const char* slit_kind(SlitKind k) {
  switch (k) {
    case SlitKind::gaussian:
      return "gaussian";
    case SlitKind::rectangular:
      return "rectangular";
    case SlitKind::open:
      return "open";
  }
  return "?";
}

}  // namespace

std::string format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double sig9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  return std::strtod(format9(v).c_str(), nullptr);
}

Json number_or_null(std::optional<double> v) { return v ? Json(sig9(*v)) : Json(nullptr); }

Json conventions() {
  Json c;
  c["length_unit"] = "mm";
  c["momentum_unit"] = "rad_per_mm";
  c["hbar"] = 1;
  c["Lambda"] = "wavelength / pi; free flight over L adds i*Lambda*L to the Gaussian parameter Gamma of exp(-y^2/Gamma)";
  c["width"] = "W of the intensity exp(-2 y^2 / W^2); rms = W/2; FWHM = sqrt(2 ln 2) W";
  c["coincidence_width"] = "W^2 = s^2 + Lambda^2 D^2 / s^2 with s^2 = epsilon^2 + a^2 (coefficient 1 on the diffraction term)";
  c["beam_width"] = "exact all-counts marginal: W^2 = Omega^2 + Lambda^2 L^2/(4 Omega^2) + a^2/4 + Lambda^2 L^2/a^2";
  c["slit_conventions"] = {{"half_width", "epsilon = full_width / 2"},
                           {"diffraction_matched", "epsilon given, matched to a reference FWHM, or far-field FWHM match"}};
  c["lens"] = "ideal relay of the slit-A plane onto slit B; Gamma = eps^2 + a^2 + i*Lambda*(L - (2f - b1))";
  return c;
}

Json tool_block() { return Json{{"name", "popper_sim"}, {"version", version()}}; }

Json scenario_echo(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["lambda_nm"] = sig9(s.params.wavelength() * 1e6);
  j["a_mm"] = sig9(s.a);
  j["a2_mm2"] = sig9(s.a * s.a);
  j["omega_mm"] = sig9(s.omega);
  Json slit;
  slit["kind"] = slit_kind(s.slit.kind);
  if (s.slit.kind != SlitKind::open) {
    slit["width_mm"] = sig9(s.slit.width);
    if (s.slit.kind == SlitKind::rectangular) {
      slit["convention"] = s.slit.convention == SlitConvention::half_width ? "half_width" : "diffraction_matched";
    }
    slit["epsilon_mm"] = sig9(s.slit.gaussian_epsilon());
  }
  j["slit"] = slit;
  if (s.lens) {
    j["lens"] = {{"f_mm", sig9(s.lens->focal_length)},
                 {"b1_mm", sig9(s.lens->b1)},
                 {"ghost_image_distance_mm", sig9(s.lens->ghost_image_distance())}};
  } else {
    j["lens"] = nullptr;
  }
  j["L1_mm"] = sig9(s.L1);
  j["L2_mm"] = sig9(s.L2);
  j["effective_distance_mm"] = sig9(s.effective_distance());
  if (s.oracle) {
    Json o;
    o["n"] = s.oracle->n ? Json(*s.oracle->n) : Json(nullptr);
    o["extent_mm"] = number_or_null(s.oracle->extent);
    j["oracle"] = o;
  }
  if (s.observed_coincidence_fwhm) j["observed_coincidence_fwhm_mm"] = sig9(*s.observed_coincidence_fwhm);
  return j;
}

Json estimate(const Estimate& e) {
  Json j;
  j["analytic"] = number_or_null(e.analytic);
  j["oracle"] = number_or_null(e.oracle);
  j["relative_delta"] = number_or_null(e.relative_delta());
  return j;
}

Json fit_result(const FitResult& f) {
  Json j;
  j["a2_mm2"] = sig9(f.a2);
  j["s_mm"] = sig9(f.s);
  j["branch"] = f.branch == FitBranch::near ? "near" : "far";
  j["s_near_mm"] = sig9(f.s_near);
  j["s_far_mm"] = sig9(f.s_far);
  j["discriminant_mm4"] = sig9(f.discriminant);
  return j;
}

Json width_report(const WidthReport& r, const std::vector<std::string>& outputs) {
  Json j;
  const bool has_oracle = r.grid.has_value();
  j["provenance"] = has_oracle ? "both" : "analytic";
  j["epsilon_mm"] = sig9(r.epsilon);
  if (wanted(outputs, "beam")) j["beam_fwhm_mm"] = estimate(r.beam_fwhm);
  if (wanted(outputs, "coincidence")) j["coincidence_fwhm_mm"] = estimate(r.coincidence_fwhm);
  if (wanted(outputs, "real_slit") && r.real_slit_fwhm) j["real_slit_fwhm_mm"] = estimate(*r.real_slit_fwhm);
  if (wanted(outputs, "ghost_image") && r.ghost_image_width) j["ghost_image_width_mm"] = estimate(*r.ghost_image_width);
  if (wanted(outputs, "virtual_slit") || wanted(outputs, "coincidence")) {
    j["virtual_slit_fwhm_mm"] = number_or_null(r.virtual_slit_fwhm);
    j["virtual_slit_distance_mm"] = number_or_null(r.virtual_slit_distance);
  }
  if (wanted(outputs, "fit") && r.fitted) j["fit"] = fit_result(*r.fitted);
  if (has_oracle) {
    const GridReport& g = *r.grid;
    Json o;
    o["n"] = g.n;
    o["extent_mm"] = sig9(g.extent);
    o["step_mm"] = sig9(2.0 * g.extent / static_cast<double>(g.n));
    o["norm_drift"] = sig9(g.norm_drift);
    o["coincidence_fraction"] = number_or_null(g.coincidence_fraction);
    o["multimodal"] = g.multimodal;
    j["oracle_grid"] = o;
  }
  return j;
}

Json document(const Json& body) {
  Json doc;
  doc["tool"] = tool_block();
  doc["conventions"] = conventions();
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  return doc;
}

void write(std::ostream& os, const Json& doc) { os << doc.dump(2) << '\n'; }

namespace {
std::string cell(std::optional<double> v) { return v ? format9(*v) : std::string(); }
}  // namespace

void width_csv(std::ostream& os, const WidthReport& r) {
  os << "quantity,analytic_mm,oracle_mm,relative_delta\n";
  const auto row = [&](const char* name, const Estimate& e) {
    os << name << ',' << cell(e.analytic) << ',' << cell(e.oracle) << ',' << cell(e.relative_delta()) << '\n';
  };
  row("beam_fwhm", r.beam_fwhm);
  row("coincidence_fwhm", r.coincidence_fwhm);
  if (r.real_slit_fwhm) row("real_slit_fwhm", *r.real_slit_fwhm);
  if (r.ghost_image_width) row("ghost_image_width", *r.ghost_image_width);
}

void curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve, bool with_oracle, bool with_fit) {
  os << "slit_full_width_mm,fwhm_analytic_mm";
  if (with_oracle) os << ",fwhm_oracle_mm";
  if (with_fit) os << ",fitted_a2_mm2";
  if (with_oracle || with_fit) os << ",status";
  os << '\n';
  for (const CurvePoint& p : curve) {
    os << format9(p.slit_full_width) << ',' << format9(p.fwhm_analytic);
    if (with_oracle) os << ',' << cell(p.fwhm_oracle);
    if (with_fit) os << ',' << (p.fitted ? format9(p.fitted->a2) : std::string());
    if (with_oracle || with_fit) {
      // Status text may contain commas; keep the column parseable.
      std::string status = p.status;
      std::replace(status.begin(), status.end(), ',', ';');
      os << ',' << status;
    }
    os << '\n';
  }
}

}  // namespace popper::cli::report
