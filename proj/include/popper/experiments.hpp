#pragma once

// Scenario runners that pair each closed-form result with an optional grid-oracle run.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "popper/gaussian_core.hpp"
#include "popper/grid_oracle.hpp"

namespace popper {

struct OracleConfig {
  std::optional<std::size_t> n;
  std::optional<double> extent;
};

struct Scenario {
  std::string name;
  PhysParams params = PhysParams::from_wavelength_nm(702.0);
  double a = 0.0;  ///< hbar / sigma; 0 is the perfect-correlation limit (analytic only)
  double omega = 0.0;
  SlitSpec slit = SlitSpec::open();
  std::optional<LensConfig> lens;
  double L1 = 0.0;
  double L2 = 0.0;
  std::optional<OracleConfig> oracle;
  std::optional<double> observed_coincidence_fwhm;
  std::vector<std::string> outputs;

  /// Validates lengths; throws ConfigError.
  void validate() const;
  /// 2 L1 + L2 for free space, L2 behind the ghost image with a lens.
  double effective_distance() const;
};

struct OracleOptions {
  bool enabled = false;
  std::optional<std::size_t> grid_n;
};

/// One quantity from the closed forms and/or the grid oracle.
struct Estimate {
  std::optional<double> analytic;
  std::optional<double> oracle;

  /// (oracle - analytic) / analytic when both exist.
  std::optional<double> relative_delta() const;
};

enum class FitBranch { near, far };

struct FitResult {
  double a2 = 0.0;         ///< s^2 - eps^2 on the selected branch
  double s = 0.0;          ///< sqrt(eps^2 + a^2) on the selected branch
  double s_near = 0.0;     ///< root below sqrt(Lambda L)
  double s_far = 0.0;      ///< root above sqrt(Lambda L)
  double discriminant = 0.0;  ///< W^4 - 4 Lambda^2 L^2 (mm^4)
  FitBranch branch = FitBranch::near;
};

struct GridReport {
  std::size_t n = 0;
  double extent = 0.0;
  double norm_drift = 0.0;
  std::optional<double> coincidence_fraction;
  bool multimodal = false;
};

struct WidthReport {
  std::string scenario;
  double epsilon = 0.0;
  double effective_distance = 0.0;
  Estimate beam_fwhm;
  Estimate coincidence_fwhm;
  std::optional<Estimate> real_slit_fwhm;
  std::optional<Estimate> ghost_image_width;
  /// Omega -> infinity coincidence FWHM at the effective distance.
  std::optional<double> virtual_slit_fwhm;
  /// Back-propagation distance that makes the conditional Gamma real.
  std::optional<double> virtual_slit_distance;
  std::optional<FitResult> fitted;
  std::optional<GridReport> grid;
};

struct CurvePoint {
  double slit_full_width = 0.0;
  double fwhm_analytic = 0.0;
  std::optional<double> fwhm_oracle;
  std::optional<double> beam_fwhm_analytic;
  std::optional<double> beam_fwhm_oracle;
  std::optional<FitResult> fitted;
  std::string status = "ok";
};

/// Coincidence FWHM behind a virtual slit of source width s = sqrt(eps^2 + a^2) seen from
/// distance D: W^2 = s^2 + Lambda^2 D^2 / s^2.
double virtual_slit_fwhm(double epsilon, double a, double distance, const PhysParams& params);

/// Kim-Shih thin-lens geometry.  Throws ConfigError without a lens.
WidthReport run_kim_shih(const Scenario& scenario, const OracleOptions& options = {});

/// Free-space Popper layout (slit A at L1, detector L2 behind slit B).  Throws ConfigError with a lens.
WidthReport run_popper_freespace(const Scenario& scenario, const OracleOptions& options = {});

/// Dispatches on the presence of a lens.
WidthReport run_scenario(const Scenario& scenario, const OracleOptions& options = {});

/// Coincidence FWHM against slit full width; epsilon from the scenario's slit convention.
/// A point whose `observed` fit fails is flagged in `status`, the sweep continues.
std::vector<CurvePoint> run_strekalov_sweep(const Scenario& scenario, const std::vector<double>& slit_full_widths,
                                            const OracleOptions& options = {});

/// Solves s^4 - W^2 s^2 + Lambda^2 L^2 = 0 for the observed FWHM and returns a^2 = s^2 - eps^2
/// on the requested branch.  Throws UnreachableWidth / SlitWiderThanLocalization.
FitResult fit_sigma_from_width(double fwhm_observed, double epsilon, double L, const PhysParams& params,
                               FitBranch branch = FitBranch::near);

/// Gaussian epsilon whose own diffraction over L gives the stated FWHM (near-field root).
double match_epsilon_from_fwhm(double fwhm, double L, const PhysParams& params);

struct DoubleSlitReport {
  double expected_spacing = 0.0;  ///< lambda (2 L1 + L2) / separation
  oracle::GhostFringes fringes;
  oracle::GridSpec grid;
};

/// Ghost double slit on the oracle: slit of particle 1 at L1, point detector d1 behind it,
/// particle 2 recorded L2 behind the slit plane.  Without `grid` the grid is sized from the state.
DoubleSlitReport run_ghost_double_slit(double a, double omega, double slit_width, double separation, double L1,
                                       double d1, double L2, const PhysParams& params,
                                       std::optional<oracle::GridSpec> grid = std::nullopt);

}  // namespace popper
