#include "popper/gaussian_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace popper {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(value));
  }
}

void require_source_state(const EprState& state, const char* op) {
  if (!state.at_source() || state.gamma_u.imag() != 0.0 || state.gamma_v.imag() != 0.0) {
    throw DomainError(std::string(op) + " is defined for the t=0 state only; use beam_width for evolved states");
  }
}

}  // namespace

PhysParams PhysParams::from_wavelength_mm(double lambda_mm) {
  require_positive(lambda_mm, "wavelength");
  return PhysParams(lambda_mm, lambda_mm / std::numbers::pi);
}

GaussianParam::GaussianParam(cplx gamma) : gamma_(gamma) {
  if (!(gamma.real() > 0.0) || !std::isfinite(gamma.real()) || !std::isfinite(gamma.imag())) {
    throw DomainError("Gaussian parameter must have positive finite real part");
  }
}

SlitSpec SlitSpec::gaussian(double epsilon) {
  require_positive(epsilon, "slit epsilon");
  return SlitSpec{SlitKind::gaussian, epsilon, SlitConvention::half_width, {}};
}

SlitSpec SlitSpec::rectangular(double full_width, SlitConvention convention, std::optional<double> matched_epsilon) {
  require_positive(full_width, "slit full width");
  if (matched_epsilon) require_positive(*matched_epsilon, "matched epsilon");
  return SlitSpec{SlitKind::rectangular, full_width, convention, matched_epsilon};
}

double SlitSpec::gaussian_epsilon() const {
  switch (kind) {
    case SlitKind::gaussian:
      return width;
    case SlitKind::rectangular:
      if (convention == SlitConvention::half_width) return 0.5 * width;
      if (matched_epsilon) return *matched_epsilon;
      // Equal far-field FWHM: sqrt(2 ln 2) lambda L / (pi eps) == 0.8859 lambda L / w.
      return kFwhmPerWidth / (std::numbers::pi * kRectFarFieldFwhm) * width;
    case SlitKind::open:
      break;
  }
  throw DomainError("an open slit has no Gaussian epsilon");
}

PropagationLeg::PropagationLeg(double L) : length(L) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw DomainError("propagation distance must be >= 0");
}

LensConfig::LensConfig(double f, double b1_) : focal_length(f), b1(b1_) {
  if (!(f > 0.0)) throw ConfigError("lens focal length must be positive");
  if (!(b1_ >= 0.0)) throw ConfigError("lens distance b1 must be >= 0");
  if (!(ghost_image_distance() > 0.0)) throw ConfigError("ghost image distance 2f - b1 must be positive");
}

EprState make_epr_state(double a, double omega) {
  require_positive(a, "a (hbar/sigma)");
  require_positive(omega, "Omega");
  return EprState{a, omega, cplx(a * a, 0.0), cplx(4.0 * omega * omega, 0.0), 0.0};
}

double position_uncertainty(const EprState& state) {
  require_source_state(state, "position_uncertainty");
  return 0.5 * std::sqrt(state.omega * state.omega + 0.25 * state.a * state.a);
}

double momentum_uncertainty(const EprState& state) {
  require_source_state(state, "momentum_uncertainty");
  return std::sqrt(1.0 / (state.a * state.a) + 0.25 / (state.omega * state.omega));
}

double instant_localization_width(double epsilon1, const EprState& state) {
  require_positive(epsilon1, "epsilon1");
  require_source_state(state, "instant_localization_width");
  const double e2 = epsilon1 * epsilon1;
  const double a2 = state.a * state.a;
  const double o2 = state.omega * state.omega;
  const double ratio = a2 / (4.0 * o2);
  const double num = e2 * (1.0 + ratio) + 0.25 * a2;
  const double den = 1.0 + 4.0 * e2 / o2 + ratio;
  return std::sqrt(num / den);
}

EprState evolve_free(const EprState& state, PropagationLeg leg, const PhysParams& params) {
  const cplx shift(0.0, 2.0 * params.reduced_wavelength() * leg.length);
  EprState out = state;
  out.gamma_u += shift;
  out.gamma_v += shift;
  out.distance += leg.length;
  return out;
}

GaussianParam condition_on_gaussian_slit(const EprState& state, const SlitSpec& slit, PropagationLeg L1,
                                         const PhysParams& params) {
  if (slit.kind != SlitKind::gaussian) {
    throw DomainError("condition_on_gaussian_slit needs a Gaussian slit; map rectangular slits first");
  }
  require_source_state(state, "condition_on_gaussian_slit");
  const double e2 = slit.width * slit.width;
  const double a2 = state.a * state.a;
  const double o2 = state.omega * state.omega;
  const cplx flight(0.0, params.reduced_wavelength() * L1.length);
  const cplx slit_term = e2 + flight;
  // a^2 / (1 + a^2/4W^2) and (W^2 + a^2/4) are both free of cancellation for large W.
  const cplx numerator = slit_term + a2 / (1.0 + a2 / (4.0 * o2));
  const cplx denominator = 1.0 + slit_term / (o2 + 0.25 * a2);
  return GaussianParam(numerator / denominator + flight);
}

double momentum_spread_conditional(GaussianParam gamma) { return 1.0 / std::sqrt(gamma.gamma().real()); }

double momentum_spread_conditional_approx(const EprState& state, double epsilon, PropagationLeg L1,
                                          const PhysParams& params) {
  const double sigma = 1.0 / state.a;
  const double t = sigma * epsilon;
  const double u = sigma * params.reduced_wavelength() * L1.length / state.omega;
  return sigma / std::sqrt(1.0 + t * t + u * u);
}

GaussianParam propagate_conditional(GaussianParam gamma, PropagationLeg leg, const PhysParams& params) {
  return GaussianParam(gamma.gamma() + cplx(0.0, params.reduced_wavelength() * leg.length));
}

double intensity_width(GaussianParam gamma) { return std::abs(gamma.gamma()) / std::sqrt(gamma.gamma().real()); }

double fwhm_from_width(double width) {
  require_positive(width, "width");
  return kFwhmPerWidth * width;
}

GaussianParam lens_ghost_param(const SlitSpec& slit, double a, const LensConfig& lens, PropagationLeg L,
                               const PhysParams& params) {
  if (!(a >= 0.0)) throw DomainError("a must be >= 0");
  const double eps = slit.gaussian_epsilon();
  const double lam = params.reduced_wavelength();
  const double source = eps * eps + a * a;
  return GaussianParam(cplx(source, lam * (L.length - lens.ghost_image_distance())));
}

double beam_width(const EprState& state, PropagationLeg leg, const PhysParams& params) {
  require_source_state(state, "beam_width");
  const double lam_l = params.reduced_wavelength() * leg.length;
  const double a2 = state.a * state.a;
  const double o2 = state.omega * state.omega;
  // Var(y2) = (Var u + Var v) / 4 with u = y1 - y2, v = y1 + y2; W = 2 sqrt(Var y2).
  return std::sqrt(o2 + lam_l * lam_l / (4.0 * o2) + 0.25 * a2 + lam_l * lam_l / a2);
}

double beam_width_printed(const EprState& state, PropagationLeg leg, const PhysParams& params) {
  require_source_state(state, "beam_width_printed");
  const double lam_l = params.reduced_wavelength() * leg.length;
  const double a2 = state.a * state.a;
  const double o2 = state.omega * state.omega;
  return std::sqrt(o2 + lam_l * lam_l / o2 + 0.25 * a2 + lam_l * lam_l / a2);
}

cplx gaussian_amplitude(GaussianParam gamma, double y) {
  const cplx g = gamma.gamma();
  const double norm = std::pow(2.0 * g.real() / (std::numbers::pi * std::norm(g)), 0.25);
  return norm * std::exp(-y * y / g);
}

double back_propagation_distance(GaussianParam gamma, const PhysParams& params) {
  return gamma.gamma().imag() / params.reduced_wavelength();
}

}  // namespace popper
