#pragma once

// Closed-form algebra for entangled Gaussian two-particle states.
//
// Conventions used throughout:
//   * lengths in millimetres, hbar = 1, momenta in rad/mm;
//   * a one-dimensional amplitude is written exp(-y^2 / Gamma) with complex Gamma;
//     free propagation over an axial distance L adds i * Lambda * L to Gamma,
//     where Lambda = lambda / pi (equivalently 2 hbar t / m = Lambda L);
//   * a "width" W is the parameter of the intensity exp(-2 y^2 / W^2), so that
//     W = |Gamma| / sqrt(Re Gamma) and the rms of the intensity is W / 2.

#include <complex>
#include <optional>

#include "popper/errors.hpp"

namespace popper {

using cplx = std::complex<double>;

/// Stand-in for Omega -> infinity.  Every formula below stays well conditioned at this size.
inline constexpr double kLargeOmega = 1.0e6;

/// sqrt(2 ln 2): FWHM of exp(-2 y^2 / W^2) in units of W.
inline constexpr double kFwhmPerWidth = 1.1774100225154747;

/// FWHM of the Fraunhofer pattern sinc^2 of a rectangular slit of full width w,
/// in units of lambda * L / w.
inline constexpr double kRectFarFieldFwhm = 0.8858929413789047;

class PhysParams {
 public:
  static PhysParams from_wavelength_mm(double lambda_mm);
  static PhysParams from_wavelength_nm(double lambda_nm) { return from_wavelength_mm(lambda_nm * 1e-6); }

  double wavelength() const { return lambda_; }
  /// Lambda = lambda / pi.
  double reduced_wavelength() const { return reduced_; }
  /// Mean wave number 2 pi / lambda (rad/mm).
  double wave_number() const { return 2.0 / reduced_; }

 private:
  PhysParams(double lambda, double reduced) : lambda_(lambda), reduced_(reduced) {}
  double lambda_;
  double reduced_;
};

/// Complex squared width of exp(-y^2 / gamma).  Re(gamma) > 0 always.
class GaussianParam {
 public:
  explicit GaussianParam(cplx gamma);
  cplx gamma() const { return gamma_; }

 private:
  cplx gamma_;
};

/// Two-particle state exp(-(y1-y2)^2 / gamma_u) * exp(-(y1+y2)^2 / gamma_v).
struct EprState {
  double a = 0.0;      ///< hbar / sigma (mm)
  double omega = 0.0;  ///< source extent Omega (mm)
  cplx gamma_u;
  cplx gamma_v;
  double distance = 0.0;  ///< free flight accumulated by both particles (mm)

  bool at_source() const { return distance == 0.0; }
};

enum class SlitKind { gaussian, rectangular, open };
enum class SlitConvention { half_width, diffraction_matched };

/// Slit A.  A rectangular slit is reduced to a Gaussian of parameter epsilon by a convention;
/// an open slit means no conditioning at all (all counts are coincidences).
struct SlitSpec {
  SlitKind kind = SlitKind::gaussian;
  double width = 0.0;  ///< epsilon for gaussian, full width for rectangular
  SlitConvention convention = SlitConvention::half_width;
  std::optional<double> matched_epsilon;  ///< pre-computed epsilon for diffraction_matched

  static SlitSpec gaussian(double epsilon);
  static SlitSpec rectangular(double full_width, SlitConvention convention,
                              std::optional<double> matched_epsilon = std::nullopt);
  static SlitSpec open() { return SlitSpec{SlitKind::open, 0.0, SlitConvention::half_width, {}}; }

  /// Gaussian epsilon that stands in for this slit.  Throws DomainError for an open slit.
  double gaussian_epsilon() const;
};

struct PropagationLeg {
  double length = 0.0;
  explicit PropagationLeg(double L);
};

struct LensConfig {
  double focal_length = 0.0;
  double b1 = 0.0;
  LensConfig(double f, double b1);
  /// Distance 2f - b1 at which particle 2 reaches the ghost image of slit A.
  double ghost_image_distance() const { return 2.0 * focal_length - b1; }
};

EprState make_epr_state(double a, double omega);

double position_uncertainty(const EprState& state);
double momentum_uncertainty(const EprState& state);

/// Localization width of particle 2 when particle 1 is localized to epsilon1 at the source.
double instant_localization_width(double epsilon1, const EprState& state);

EprState evolve_free(const EprState& state, PropagationLeg leg, const PhysParams& params);

/// State of particle 2 after particle 1 (source state `state`, flown L1) is projected onto
/// the Gaussian slit amplitude.
GaussianParam condition_on_gaussian_slit(const EprState& state, const SlitSpec& slit, PropagationLeg L1,
                                         const PhysParams& params);

/// Momentum spread 1 / sqrt(Re Gamma) of the conditional state.
double momentum_spread_conditional(GaussianParam gamma);

/// Large-Omega approximation sigma / sqrt(1 + (sigma eps)^2 + (sigma Lambda L1 / Omega)^2).
double momentum_spread_conditional_approx(const EprState& state, double epsilon, PropagationLeg L1,
                                          const PhysParams& params);

GaussianParam propagate_conditional(GaussianParam gamma, PropagationLeg leg, const PhysParams& params);

/// W = |Gamma| / sqrt(Re Gamma).
double intensity_width(GaussianParam gamma);

double fwhm_from_width(double width);

/// Particle 2 behind the thin-lens ghost-imaging setup, having flown L from the source.
GaussianParam lens_ghost_param(const SlitSpec& slit, double a, const LensConfig& lens, PropagationLeg L,
                               const PhysParams& params);

/// All-counts width W of particle 2 after both particles flew L (exact marginal of the
/// evolved two-particle state).
double beam_width(const EprState& state, PropagationLeg leg, const PhysParams& params);

/// The beam-spread expression as commonly printed:
/// sqrt(Omega^2 + Lambda^2 L^2 / Omega^2 + a^2 / 4 + Lambda^2 L^2 / a^2).
double beam_width_printed(const EprState& state, PropagationLeg leg, const PhysParams& params);

/// Normalized amplitude ((G + G*) / (pi G G*))^(1/4) exp(-y^2 / G).
cplx gaussian_amplitude(GaussianParam gamma, double y);

/// Distance by which the state must be propagated backwards to make Gamma real.
double back_propagation_distance(GaussianParam gamma, const PhysParams& params);

}  // namespace popper
