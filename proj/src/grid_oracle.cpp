#include "popper/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace popper::oracle {

namespace {

using detail::FftPlan;
using detail::wave_number;

constexpr std::size_t kMaxPaddedPoints = std::size_t{1} << 22;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(double value) {
  std::size_t n = 1;
  while (static_cast<double>(n) < value) n <<= 1;
  return n;
}

double source_rms(double a, double omega) { return 0.5 * std::sqrt(omega * omega + 0.25 * a * a); }
double source_momentum(double a, double omega) { return std::sqrt(1.0 / (a * a) + 0.25 / (omega * omega)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Fraction of `density` (uniform spacing, centred) lying in the outer guard band.
double tail_fraction(std::span<const double> density) {
  const std::size_t n = density.size();
  const auto band = static_cast<std::size_t>(std::ceil(kGuardBand * 0.5 * static_cast<double>(n)));
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += density[j];
    if (j < band || j >= n - band) tail += density[j];
  }
  return total > 0.0 ? tail / total : 0.0;
}

void guard_2d(const GridState& state, const char* where) {
  const std::size_t n = state.n();
  std::vector<double> m1(n, 0.0);
  std::vector<double> m2(n, 0.0);
  const auto psi = state.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::norm(psi[i * n + j]);
      m1[i] += p;
      m2[j] += p;
    }
  }
  const double tail = std::max(tail_fraction(m1), tail_fraction(m2));
  if (tail > kGuardTailProbability) {
    throw ResolutionError(std::string(where) + ": probability " + fmt(tail) +
                          " reached the outer grid band; increase the grid extent (currently " +
                          fmt(state.grid().extent) + " mm)");
  }
}

void guard_1d(std::span<const cplx> values, const char* where) {
  std::vector<double> density(values.size());
  std::transform(values.begin(), values.end(), density.begin(), [](cplx c) { return std::norm(c); });
  const double tail = tail_fraction(density);
  if (tail > kGuardTailProbability) {
    throw ResolutionError(std::string(where) + ": probability " + fmt(tail) +
                          " reached the outer grid band; amplitude spread exceeds the padded grid");
  }
}

struct Moments {
  double mean_y = 0.0;
  double rms_y = 0.0;
  double mean_k = 0.0;
  double rms_k = 0.0;
};

Moments moments_1d(std::span<const cplx> values, double dy) {
  const std::size_t n = values.size();
  Moments m;
  double total = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = (static_cast<double>(j) - static_cast<double>(n / 2)) * dy;
    const double p = std::norm(values[j]);
    total += p;
    s1 += p * y;
    s2 += p * y * y;
  }
  m.mean_y = s1 / total;
  m.rms_y = std::sqrt(std::max(0.0, s2 / total - m.mean_y * m.mean_y));

  std::vector<cplx> spectrum(values.begin(), values.end());
  FftPlan plan(1, n);
  plan.forward(spectrum);
  double kt = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double k = wave_number(j, n, dy);
    const double p = std::norm(spectrum[j]);
    kt += p;
    k1 += p * k;
    k2 += p * k * k;
  }
  m.mean_k = k1 / kt;
  m.rms_k = std::sqrt(std::max(0.0, k2 / kt - m.mean_k * m.mean_k));
  return m;
}

/// Padded size that holds an amplitude with the given moments after flight L.
std::size_t padded_size(std::size_t n, double dy, const Moments& m, double L, const PhysParams& params) {
  const double drift = 0.5 * params.reduced_wavelength() * L;  // dy/dL = k Lambda / 2
  const double centre = std::abs(m.mean_y + drift * m.mean_k);
  const double spread = m.rms_y + drift * m.rms_k;
  const double half = std::max(0.5 * static_cast<double>(n) * dy, centre + 7.0 * spread);
  const std::size_t padded = std::max(n, next_power_of_two(2.0 * half / dy));
  if (padded > kMaxPaddedPoints) {
    throw ResolutionError("free flight of " + fmt(L) + " mm needs " + std::to_string(padded) +
                          " points at step " + fmt(dy) + " mm");
  }
  return padded;
}

std::vector<cplx> propagator_phase(std::size_t n, double dy, double L, const PhysParams& params) {
  std::vector<cplx> phase(n);
  const double c = 0.25 * params.reduced_wavelength() * L;
  for (std::size_t j = 0; j < n; ++j) {
    const double k = wave_number(j, n, dy);
    phase[j] = std::polar(1.0, -c * k * k);
  }
  return phase;
}

}  // namespace

void GridSpec::validate() const {
  if (n < kMinGridPoints || !is_power_of_two(n)) {
    throw ResolutionError("grid size must be a power of two >= 256, got " + std::to_string(n));
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ResolutionError("grid extent must be positive");
}

std::size_t max_grid_points() {
  if (const char* env = std::getenv("POPPER_SIM_MAX_GRID")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v >= kMinGridPoints) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxGridPoints;
}

GridSpec auto_grid(double a, double omega, double flight, double min_feature, const PhysParams& params,
                   std::optional<std::size_t> forced_n) {
  if (!(a > 0.0) || !(omega > 0.0)) throw DomainError("grid sizing needs a > 0 and Omega > 0");
  if (!(min_feature > 0.0)) throw DomainError("grid sizing needs a positive feature size");
  // rms of either particle after both flew `flight`.
  const double lam_l = params.reduced_wavelength() * flight;
  const double rms = 0.5 * std::sqrt(omega * omega + lam_l * lam_l / (4.0 * omega * omega) + 0.25 * a * a +
                                     lam_l * lam_l / (a * a));
  const double extent = 6.0 * rms;
  const double step = std::min(std::numbers::pi / (7.0 * source_momentum(a, omega)), 0.5 * min_feature);
  std::size_t n = std::max(kMinGridPoints, next_power_of_two(2.0 * extent / step));
  if (forced_n) {
    if (*forced_n < n) {
      throw ResolutionError("grid n=" + std::to_string(*forced_n) + " too coarse: needs n >= " + std::to_string(n) +
                            " (step <= " + fmt(step) + " mm over extent " + fmt(extent) + " mm)");
    }
    n = *forced_n;
  }
  if (n > max_grid_points()) {
    throw ResolutionError("scenario needs n=" + std::to_string(n) + " points per axis (extent " + fmt(extent) +
                          " mm, step " + fmt(step) + " mm); POPPER_SIM_MAX_GRID allows " +
                          std::to_string(max_grid_points()));
  }
  GridSpec grid{n, extent};
  grid.validate();
  return grid;
}

GridState::GridState(GridSpec grid, std::vector<cplx> psi) : grid_(grid), psi_(std::move(psi)) {
  grid_.validate();
  if (psi_.size() != grid_.n * grid_.n) throw std::logic_error("grid state size mismatch");
}

double GridState::norm() const {
  double s = 0.0;
  for (const cplx& c : psi_) s += std::norm(c);
  return s * dy() * dy();
}

Aperture Aperture::gaussian(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("Gaussian aperture needs epsilon > 0");
  return Aperture{ApertureKind::gaussian, epsilon, 0.0, 0.0};
}

Aperture Aperture::rect(double full_width) {
  if (!(full_width > 0.0)) throw DomainError("rect aperture needs a positive width");
  return Aperture{ApertureKind::rect, full_width, 0.0, 0.0};
}

Aperture Aperture::double_slit(double slit_width, double center_separation) {
  if (!(slit_width > 0.0)) throw DomainError("double slit needs a positive slit width");
  if (!(center_separation > slit_width)) throw DomainError("double slit separation must exceed the slit width");
  return Aperture{ApertureKind::double_slit, slit_width, center_separation, 0.0};
}

Aperture Aperture::point(double y, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("point aperture needs a positive tolerance");
  return Aperture{ApertureKind::point, tolerance, 0.0, y};
}

double Aperture::profile(double y) const {
  switch (kind) {
    case ApertureKind::gaussian:
      return std::exp(-y * y / (width * width));
    case ApertureKind::rect:
      return std::abs(y) <= 0.5 * width ? 1.0 : 0.0;
    case ApertureKind::double_slit: {
      const double h = 0.5 * separation;
      return (std::abs(y - h) <= 0.5 * width || std::abs(y + h) <= 0.5 * width) ? 1.0 : 0.0;
    }
    case ApertureKind::point: {
      const double d = y - center;
      return std::exp(-d * d / (width * width));
    }
  }
  return 0.0;
}

GridState build_grid_state(double a, double omega, const GridSpec& grid) {
  grid.validate();
  if (!(a > 0.0) || !(omega > 0.0)) throw DomainError("grid state needs a > 0 and Omega > 0");
  const double need_extent = 6.0 * source_rms(a, omega);
  const double need_step = std::numbers::pi / (6.0 * source_momentum(a, omega));
  if (grid.extent < need_extent || grid.step() > need_step) {
    throw ResolutionError("grid (n=" + std::to_string(grid.n) + ", extent=" + fmt(grid.extent) +
                          " mm) cannot hold the source state: need extent >= " + fmt(need_extent) +
                          " mm and step <= " + fmt(need_step) + " mm");
  }
  const std::size_t n = grid.n;
  std::vector<cplx> psi(n * n);
  const double inv_a2 = 1.0 / (a * a);
  const double inv_v = 1.0 / (4.0 * omega * omega);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = grid.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double y2 = grid.coordinate(j);
      const double u = y1 - y2;
      const double v = y1 + y2;
      const double value = std::exp(-u * u * inv_a2 - v * v * inv_v);
      psi[i * n + j] = value;
      total += value * value;
    }
  }
  const double scale = 1.0 / std::sqrt(total * grid.step() * grid.step());
  for (cplx& c : psi) c *= scale;
  return GridState(grid, std::move(psi));
}

GridState evolve_spectral(const GridState& state, double L_particle1, double L_particle2, const PhysParams& params) {
  if (!(L_particle1 >= 0.0) || !(L_particle2 >= 0.0)) throw DomainError("flight distances must be >= 0");
  const std::size_t n = state.n();
  const double dy = state.dy();
  std::vector<cplx> psi(state.values().begin(), state.values().end());
  FftPlan plan(n, n);
  plan.forward(psi);
  const auto p1 = propagator_phase(n, dy, L_particle1, params);
  const auto p2 = propagator_phase(n, dy, L_particle2, params);
  const double inv = 1.0 / static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx row = p1[i] * inv;
    cplx* line = psi.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) line[j] *= row * p2[j];
  }
  plan.inverse(psi);
  GridState out(state.grid(), std::move(psi));
  guard_2d(out, "evolve_spectral");
  return out;
}

Amplitude1D condition(const GridState& state, const Aperture& aperture) {
  const std::size_t n = state.n();
  const double dy = state.dy();
  std::vector<double> phi1(n);
  double norm1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phi1[i] = aperture.profile(state.coordinate(i));
    norm1 += phi1[i] * phi1[i];
  }
  if (!(norm1 > 0.0)) throw DegenerateConditioning("aperture does not cover any grid point");
  const double s1 = 1.0 / std::sqrt(norm1 * dy);

  std::vector<cplx> phi2(n, cplx{});
  const auto psi = state.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = phi1[i] * s1 * dy;
    if (w == 0.0) continue;
    const cplx* row = psi.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) phi2[j] += w * row[j];
  }
  double weight = 0.0;
  for (const cplx& c : phi2) weight += std::norm(c);
  weight *= dy;
  if (weight < 1e-12) {
    throw DegenerateConditioning("conditioning weight " + fmt(weight) + " below 1e-12");
  }
  const double s2 = 1.0 / std::sqrt(weight);
  for (cplx& c : phi2) c *= s2;
  return Amplitude1D{std::move(phi2), dy, weight};
}

Amplitude1D propagate(const Amplitude1D& amplitude, double L, const PhysParams& params) {
  if (!(L >= 0.0)) throw DomainError("flight distance must be >= 0");
  const std::size_t n = amplitude.size();
  const double dy = amplitude.dy;
  const std::size_t m = padded_size(n, dy, moments_1d(amplitude.values, dy), L, params);
  std::vector<cplx> buf(m, cplx{});
  std::copy(amplitude.values.begin(), amplitude.values.end(), buf.begin() + static_cast<std::ptrdiff_t>((m - n) / 2));
  FftPlan plan(1, m);
  plan.forward(buf);
  const auto phase = propagator_phase(m, dy, L, params);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) buf[j] *= phase[j] * inv;
  plan.inverse(buf);
  guard_1d(buf, "propagate");
  return Amplitude1D{std::move(buf), dy, amplitude.weight};
}

Intensity1D marginal_particle2(const GridState& state, double extra_L2, const PhysParams& params) {
  if (!(extra_L2 >= 0.0)) throw DomainError("flight distance must be >= 0");
  const std::size_t n = state.n();
  const double dy = state.dy();
  const auto psi = state.values();

  // Particle-2 moments of the whole state, accumulated row by row.
  FftPlan row_plan(1, n);
  Moments total;
  {
    double w = 0.0, y1 = 0.0, y2 = 0.0, kw = 0.0, k1 = 0.0, k2 = 0.0;
    std::vector<cplx> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(psi.data() + i * n, n, row.begin());
      for (std::size_t j = 0; j < n; ++j) {
        const double p = std::norm(row[j]);
        const double y = state.coordinate(j);
        w += p;
        y1 += p * y;
        y2 += p * y * y;
      }
      row_plan.forward(row);
      for (std::size_t j = 0; j < n; ++j) {
        const double p = std::norm(row[j]);
        const double k = wave_number(j, n, dy);
        kw += p;
        k1 += p * k;
        k2 += p * k * k;
      }
    }
    total.mean_y = y1 / w;
    total.rms_y = std::sqrt(std::max(0.0, y2 / w - total.mean_y * total.mean_y));
    total.mean_k = k1 / kw;
    total.rms_k = std::sqrt(std::max(0.0, k2 / kw - total.mean_k * total.mean_k));
  }

  const std::size_t m = extra_L2 > 0.0 ? padded_size(n, dy, total, extra_L2, params) : n;
  std::vector<double> density(m, 0.0);
  if (extra_L2 == 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) density[j] += std::norm(psi[i * n + j]);
  } else {
    FftPlan plan(1, m);
    const auto phase = propagator_phase(m, dy, extra_L2, params);
    const double inv = 1.0 / static_cast<double>(m);
    const std::size_t offset = (m - n) / 2;
    std::vector<cplx> buf(m);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(buf.begin(), buf.end(), cplx{});
      std::copy_n(psi.data() + i * n, n, buf.begin() + static_cast<std::ptrdiff_t>(offset));
      plan.forward(buf);
      for (std::size_t j = 0; j < m; ++j) buf[j] *= phase[j] * inv;
      plan.inverse(buf);
      for (std::size_t j = 0; j < m; ++j) density[j] += std::norm(buf[j]);
    }
  }
  const double tail = tail_fraction(density);
  if (tail > kGuardTailProbability) {
    throw ResolutionError("marginal_particle2: probability " + fmt(tail) + " reached the outer grid band");
  }
  double sum = 0.0;
  for (double d : density) sum += d;
  for (double& d : density) d /= sum * dy;
  return Intensity1D{std::move(density), dy};
}

Intensity1D intensity(const Amplitude1D& amplitude) {
  std::vector<double> d(amplitude.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    d[j] = std::norm(amplitude.values[j]);
    sum += d[j];
  }
  for (double& v : d) v /= sum * amplitude.dy;
  return Intensity1D{std::move(d), amplitude.dy};
}

Widths widths(const Intensity1D& profile) {
  const auto& I = profile.values;
  const std::size_t n = I.size();
  if (n < 3) throw ResolutionError("profile too short for width extraction");
  Widths w;
  double total = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = profile.coordinate(j);
    total += I[j];
    s1 += I[j] * y;
    s2 += I[j] * y * y;
  }
  w.mean = s1 / total;
  w.rms = std::sqrt(std::max(0.0, s2 / total - w.mean * w.mean));
  w.gaussian_equiv_w = 2.0 * w.rms;

  const auto peak_it = std::max_element(I.begin(), I.end());
  const auto peak = static_cast<std::size_t>(peak_it - I.begin());
  const double half = 0.5 * *peak_it;
  std::size_t lo = peak;
  while (lo > 0 && I[lo] > half) --lo;
  std::size_t hi = peak;
  while (hi + 1 < n && I[hi] > half) ++hi;
  if (I[lo] > half || I[hi] > half) {
    throw ResolutionError("profile does not drop below half maximum inside the grid");
  }
  const double y_lo = profile.coordinate(lo) + (half - I[lo]) / (I[lo + 1] - I[lo]) * profile.dy;
  const double y_hi = profile.coordinate(hi - 1) + (I[hi - 1] - half) / (I[hi - 1] - I[hi]) * profile.dy;
  w.fwhm = y_hi - y_lo;

  // Multimodal: two significant local maxima separated by a real dip.
  const double floor = 0.05 * *peak_it;
  std::vector<std::size_t> maxima;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (I[j] > floor && I[j] > I[j - 1] && I[j] >= I[j + 1]) maxima.push_back(j);
  }
  for (std::size_t k = 1; k < maxima.size() && !w.multimodal; ++k) {
    const double dip = *std::min_element(I.begin() + static_cast<std::ptrdiff_t>(maxima[k - 1]),
                                         I.begin() + static_cast<std::ptrdiff_t>(maxima[k]));
    if (dip < 0.95 * std::min(I[maxima[k - 1]], I[maxima[k]])) w.multimodal = true;
  }
  return w;
}

Widths widths(const Amplitude1D& amplitude) { return widths(intensity(amplitude)); }

cplx estimate_gaussian_param(const Amplitude1D& amplitude) {
  const std::size_t n = amplitude.size();
  const double dy = amplitude.dy;
  std::vector<cplx> deriv(amplitude.values);
  FftPlan plan(1, n);
  plan.forward(deriv);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) deriv[j] *= cplx(0.0, wave_number(j, n, dy)) * inv;
  plan.inverse(deriv);
  cplx num{};
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = amplitude.coordinate(j);
    num += y * std::conj(amplitude.values[j]) * deriv[j];
    den += y * y * std::norm(amplitude.values[j]);
  }
  return 1.0 / (-num / (2.0 * den));
}

double position_correlation(const GridState& state) {
  const std::size_t n = state.n();
  const auto psi = state.values();
  double w = 0.0, m1 = 0.0, m2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = state.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double y2 = state.coordinate(j);
      const double p = std::norm(psi[i * n + j]);
      w += p;
      m1 += p * y1;
      m2 += p * y2;
      s11 += p * y1 * y1;
      s22 += p * y2 * y2;
      s12 += p * y1 * y2;
    }
  }
  m1 /= w;
  m2 /= w;
  const double c11 = s11 / w - m1 * m1;
  const double c22 = s22 / w - m2 * m2;
  const double c12 = s12 / w - m1 * m2;
  return c12 / std::sqrt(c11 * c22);
}

double particle2_rms(const GridState& state) {
  const std::size_t n = state.n();
  std::vector<double> marginal(n, 0.0);
  const auto psi = state.values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) marginal[j] += std::norm(psi[i * n + j]);
  return widths(Intensity1D{std::move(marginal), state.dy()}).rms;
}

namespace {

/// Vertex of the parabola through (j-1, j, j+1), in grid coordinates.
double refine_extremum(const Intensity1D& p, std::size_t j) {
  const double a = p.values[j - 1];
  const double b = p.values[j];
  const double c = p.values[j + 1];
  const double denom = a - 2.0 * b + c;
  const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
  return p.coordinate(j) + shift * p.dy;
}

struct FringeSide {
  std::optional<std::size_t> minimum;
  std::optional<std::size_t> next_maximum;
};

FringeSide walk(const Intensity1D& p, std::size_t peak, int dir) {
  const auto& I = p.values;
  const auto n = static_cast<std::ptrdiff_t>(I.size());
  auto j = static_cast<std::ptrdiff_t>(peak);
  while (j + dir > 0 && j + dir < n - 1 && I[j + dir] <= I[j]) j += dir;
  FringeSide side;
  if (j + dir <= 0 || j + dir >= n - 1) return side;
  const auto min_at = j;
  while (j + dir > 0 && j + dir < n - 1 && I[j + dir] >= I[j]) j += dir;
  // Only a secondary maximum of at least 1% of the central one makes the dip a fringe.
  if (I[j] < 0.01 * I[peak]) return side;
  side.minimum = static_cast<std::size_t>(min_at);
  side.next_maximum = static_cast<std::size_t>(j);
  return side;
}

}  // namespace

GhostFringes ghost_double_slit(const GridState& state, const Aperture& slit, double d1, double L2,
                               const PhysParams& params) {
  if (slit.kind != ApertureKind::double_slit && slit.kind != ApertureKind::rect) {
    throw DomainError("ghost_double_slit expects a double-slit or single rect aperture");
  }
  const std::size_t n = state.n();
  std::vector<cplx> masked(state.values().begin(), state.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    const double t = slit.profile(state.coordinate(i));
    for (std::size_t j = 0; j < n; ++j) masked[i * n + j] *= t;
  }
  GridState behind(state.grid(), std::move(masked));
  const double transmitted = behind.norm();
  if (transmitted < 1e-12) throw DegenerateConditioning("slit blocks the whole state");
  const double s = 1.0 / std::sqrt(transmitted);
  for (cplx& c : behind.mutable_values()) c *= s;

  const GridState at_detector = evolve_spectral(behind, d1, 0.0, params);
  const Amplitude1D partner = condition(at_detector, Aperture::point(0.0, at_detector.dy()));
  const Amplitude1D screen = propagate(partner, L2, params);

  GhostFringes out;
  out.pattern = intensity(screen);
  out.coincidence_fraction = transmitted * partner.weight;
  const auto& I = out.pattern.values;
  const auto peak = static_cast<std::size_t>(std::max_element(I.begin(), I.end()) - I.begin());
  const FringeSide left = walk(out.pattern, peak, -1);
  const FringeSide right = walk(out.pattern, peak, +1);
  if (left.minimum && right.minimum) {
    out.fringe_spacing = refine_extremum(out.pattern, *right.minimum) - refine_extremum(out.pattern, *left.minimum);
    out.fringe_spacing_maxima =
        0.5 * (refine_extremum(out.pattern, *right.next_maximum) - refine_extremum(out.pattern, *left.next_maximum));
    const double dark = 0.5 * (I[*left.minimum] + I[*right.minimum]);
    out.visibility = (I[peak] - dark) / (I[peak] + dark);
  }
  return out;
}

}  // namespace popper::oracle
