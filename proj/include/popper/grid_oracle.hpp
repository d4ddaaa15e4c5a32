#pragma once

// Brute-force reference simulator: the two-particle amplitude psi(y1, y2) sampled on an
// n x n periodic grid, free flight applied exactly in the discrete Fourier domain, and
// slit conditioning done by direct quadrature.  Nothing here uses the closed forms of
// gaussian_core; it exists to check them.
//
// Sampling: y_j = (j - n/2) * dy with dy = 2 * extent / n, j = 0 .. n-1, so y = 0 is a
// grid point and the grid is FFT-consistent.  psi is stored row-major, psi[i1 * n + i2].

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "popper/errors.hpp"
#include "popper/gaussian_core.hpp"

namespace popper::oracle {

inline constexpr std::size_t kMinGridPoints = 256;
inline constexpr std::size_t kDefaultMaxGridPoints = 4096;
/// Outer fraction of each axis watched by the aliasing guard.
inline constexpr double kGuardBand = 0.05;
inline constexpr double kGuardTailProbability = 1e-6;

struct GridSpec {
  std::size_t n = 0;
  double extent = 0.0;  ///< half-width of [-extent, extent)

  double step() const { return 2.0 * extent / static_cast<double>(n); }
  double coordinate(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n / 2)) * step();
  }
  /// Throws ResolutionError unless n >= 256 is a power of two and extent > 0.
  void validate() const;
};

/// Largest n per axis allowed; reads POPPER_SIM_MAX_GRID, defaults to 4096.
std::size_t max_grid_points();

/// Grid large enough to hold the source state after both particles fly `flight`, and fine
/// enough to resolve its momentum spread and features of size `min_feature`.
GridSpec auto_grid(double a, double omega, double flight, double min_feature, const PhysParams& params,
                   std::optional<std::size_t> forced_n = std::nullopt);

class GridState {
 public:
  GridState(GridSpec grid, std::vector<cplx> psi);

  const GridSpec& grid() const { return grid_; }
  std::size_t n() const { return grid_.n; }
  double dy() const { return grid_.step(); }
  double coordinate(std::size_t j) const { return grid_.coordinate(j); }

  cplx at(std::size_t i1, std::size_t i2) const { return psi_[i1 * grid_.n + i2]; }
  std::span<const cplx> values() const { return psi_; }
  std::span<cplx> mutable_values() { return psi_; }

  /// sum |psi|^2 dy^2
  double norm() const;

 private:
  GridSpec grid_;
  std::vector<cplx> psi_;
};

enum class ApertureKind { gaussian, rect, double_slit, point };

/// Amplitude transmitted by slit A (or seen by a point detector) as a function of y1.
struct Aperture {
  ApertureKind kind = ApertureKind::gaussian;
  double width = 0.0;       ///< epsilon (gaussian), full width (rect, each slit of double_slit), tolerance (point)
  double separation = 0.0;  ///< centre-to-centre, double_slit only
  double center = 0.0;      ///< y*, point only

  static Aperture gaussian(double epsilon);
  static Aperture rect(double full_width);
  static Aperture double_slit(double slit_width, double center_separation);
  static Aperture point(double y, double tolerance);

  double profile(double y) const;
};

/// One-particle amplitude on a centred grid y_j = (j - n/2) dy.
struct Amplitude1D {
  std::vector<cplx> values;
  double dy = 0.0;
  /// Squared norm before renormalization; for a conditional state this is the coincidence fraction.
  double weight = 1.0;

  std::size_t size() const { return values.size(); }
  double coordinate(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(values.size() / 2)) * dy;
  }
};

/// Intensity profile on a centred grid, normalized to unit integral.
struct Intensity1D {
  std::vector<double> values;
  double dy = 0.0;

  std::size_t size() const { return values.size(); }
  double coordinate(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(values.size() / 2)) * dy;
  }
};

struct Widths {
  double mean = 0.0;
  double rms = 0.0;
  double fwhm = 0.0;              ///< of the lobe holding the global maximum
  double gaussian_equiv_w = 0.0;  ///< 2 * rms
  bool multimodal = false;
};

/// exp(-(y1-y2)^2 / a^2) exp(-(y1+y2)^2 / 4 Omega^2), normalized on the grid.
GridState build_grid_state(double a, double omega, const GridSpec& grid);

/// Particle i gains phase exp(-i k_i^2 Lambda L_i / 4) per plane wave.
GridState evolve_spectral(const GridState& state, double L_particle1, double L_particle2, const PhysParams& params);

/// phi2(y2) = sum_y1 conj(phi1(y1)) psi(y1, y2) dy with phi1 normalized on the grid;
/// result renormalized, weight = its norm before renormalization.
Amplitude1D condition(const GridState& state, const Aperture& aperture);

/// Free flight of a one-particle amplitude.  The grid is zero-padded (same dy) as far as
/// needed to hold the spread; the aliasing guard still applies.
Amplitude1D propagate(const Amplitude1D& amplitude, double L, const PhysParams& params);

/// All-counts intensity of particle 2 after it alone flies a further `extra_L2`.
Intensity1D marginal_particle2(const GridState& state, double extra_L2, const PhysParams& params);

Intensity1D intensity(const Amplitude1D& amplitude);

Widths widths(const Intensity1D& profile);
Widths widths(const Amplitude1D& amplitude);

/// Estimate of Gamma for a (near-)Gaussian amplitude centred at 0:
/// 1/Gamma = -<y phi* phi'> / (2 <y^2>), phi' taken spectrally.
cplx estimate_gaussian_param(const Amplitude1D& amplitude);

/// Pearson correlation of y1 and y2 under |psi|^2.
double position_correlation(const GridState& state);

/// rms of the particle-2 marginal of |psi|^2.
double particle2_rms(const GridState& state);

struct GhostFringes {
  Intensity1D pattern;
  double fringe_spacing = 0.0;          ///< between the dark fringes flanking the central maximum
  double fringe_spacing_maxima = 0.0;   ///< between the central maximum and its neighbours
  double visibility = 0.0;              ///< central maximum vs adjacent minimum
  double coincidence_fraction = 0.0;
};

/// Strekalov geometry: particle 1 crosses `slit` on the input state's slit plane, flies d1
/// to a point detector fixed at y1 = 0 (Gaussian sampler one grid step wide); particle 2
/// is recorded in coincidence after flying L2 from that plane.
GhostFringes ghost_double_slit(const GridState& state, const Aperture& slit, double d1, double L2,
                               const PhysParams& params);

}  // namespace popper::oracle
