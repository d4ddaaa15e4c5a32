#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "popper/experiments.hpp"
#include "popper/grid_oracle.hpp"

using namespace popper;
using namespace popper::oracle;
using doctest::Approx;

namespace {

const PhysParams kP = PhysParams::from_wavelength_nm(702.0);
const double kA043 = std::sqrt(0.043);

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

Amplitude1D gaussian_amp(double eps, std::size_t n, double dy) {
  Amplitude1D amp{std::vector<cplx>(n), dy, 1.0};
  double sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = amp.coordinate(j);
    amp.values[j] = std::exp(-y * y / (eps * eps));
    sum += std::norm(amp.values[j]) * dy;
  }
  for (auto& c : amp.values) c /= std::sqrt(sum);
  return amp;
}

double norm1d(const Amplitude1D& a) {
  double s = 0;
  for (auto c : a.values) s += std::norm(c);
  return s * a.dy;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS((GridSpec{100, 1.0}).validate(), ResolutionError);
  CHECK_THROWS_AS((GridSpec{128, 1.0}).validate(), ResolutionError);
  CHECK_THROWS_AS((GridSpec{256, 0.0}).validate(), ResolutionError);
  CHECK_NOTHROW((GridSpec{256, 1.0}).validate());
  const GridSpec g{512, 4.0};
  CHECK(g.step() == Approx(8.0 / 512));
  CHECK(g.coordinate(256) == 0.0);
  CHECK(g.coordinate(0) == Approx(-4.0));
}

TEST_CASE("auto grid honours the point cap") {
  const auto g = auto_grid(kA043, 2.0, 500.0, 0.065, kP);
  CHECK(g.n >= kMinGridPoints);
  CHECK(g.step() <= 0.0325 + 1e-15);
  CHECK_THROWS_AS(auto_grid(0.01, 50.0, 0.0, 0.001, kP), ResolutionError);
  CHECK_THROWS_AS(auto_grid(kA043, 2.0, 500.0, 0.065, kP, 256), ResolutionError);
  CHECK(auto_grid(kA043, 2.0, 500.0, 0.065, kP, 1024).n == 1024);
}

TEST_CASE("build_grid_state") {
  SUBCASE("separable state has no correlation") {
    const auto s = build_grid_state(1.0, 0.5, GridSpec{512, 4.0});
    CHECK(std::abs(position_correlation(s)) < 1e-6);
    CHECK(s.norm() == Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("position spread matches the closed form") {
    const auto s = build_grid_state(0.2074, 2.0, GridSpec{1024, 12.0});
    CHECK(rel(particle2_rms(s), 1.00134) < 0.002);
    CHECK(rel(particle2_rms(s), position_uncertainty(make_epr_state(0.2074, 2.0))) < 1e-6);
    CHECK(s.norm() == Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("correlation departs monotonically from the product point") {
    double prev = 0.0;
    for (double f : {1.0, 1.01, 1.02, 1.05, 1.1}) {
      const double r = std::abs(position_correlation(build_grid_state(1.0 * f, 0.5, GridSpec{512, 4.0})));
      if (f > 1.0) CHECK(r > prev);
      prev = r;
    }
    CHECK(prev > 1e-3);
  }
  SUBCASE("inadequate grid names the requirement") {
    try {
      build_grid_state(kA043, 5.0, GridSpec{256, 5.0});
      FAIL("expected ResolutionError");
    } catch (const ResolutionError& e) {
      CHECK(std::string(e.what()).find("need extent") != std::string::npos);
    }
    CHECK_THROWS_AS(build_grid_state(0.01, 1.0, GridSpec{256, 4.0}), ResolutionError);
  }
}

TEST_CASE("spectral propagation") {
  SUBCASE("single-particle factor") {
    // a = 2 Omega with a^2 / 2 = 0.01 puts exp(-y^2/0.01) on each particle.
    const double a = std::sqrt(0.02);
    const auto s = build_grid_state(a, a / 2, GridSpec{512, 2.0});
    const auto e = evolve_spectral(s, 0.0, 100.0, kP);
    const auto marg = marginal_particle2(e, 0.0, kP);
    CHECK(rel(widths(marg).gaussian_equiv_w, 0.24481) < 0.001);
    CHECK(std::abs(e.norm() - 1.0) < 1e-10);

    const auto p = propagate(gaussian_amp(0.1, 512, 4.0 / 512), 100.0, kP);
    CHECK(rel(widths(p).gaussian_equiv_w, 0.244809078) < 1e-4);
    const cplx g = estimate_gaussian_param(p);
    CHECK(g.real() == Approx(0.01).epsilon(1e-6));
    CHECK(g.imag() == Approx(0.0223453540).epsilon(1e-6));
    CHECK(norm1d(p) == Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("zero flight is the identity") {
    const auto s = build_grid_state(kA043, 2.0, GridSpec{512, 8.0});
    const auto e = evolve_spectral(s, 0.0, 0.0, kP);
    double worst = 0, peak = 0;
    for (std::size_t i = 0; i < s.values().size(); ++i) {
      worst = std::max(worst, std::abs(e.values()[i] - s.values()[i]));
      peak = std::max(peak, std::abs(s.values()[i]));
    }
    CHECK(worst / peak < 1e-13);
  }
  SUBCASE("unitarity") {
    const auto s = build_grid_state(kA043, 2.0, auto_grid(kA043, 2.0, 500.0, 0.065, kP));
    const auto e = evolve_spectral(s, 500.0, 250.0, kP);
    CHECK(std::abs(e.norm() - 1.0) < 1e-10);
    const auto e2 = evolve_spectral(e, 0.0, 250.0, kP);
    CHECK(std::abs(e2.norm() - 1.0) < 1e-10);
  }
  SUBCASE("aliasing guard") {
    const auto s = build_grid_state(0.1, 0.5, GridSpec{256, 3.0});
    CHECK_THROWS_AS(evolve_spectral(s, 3000.0, 3000.0, kP), ResolutionError);
  }
  SUBCASE("flights compose") {
    const auto s = build_grid_state(kA043, 2.0, auto_grid(kA043, 2.0, 400.0, 0.065, kP));
    const auto once = evolve_spectral(s, 400.0, 400.0, kP);
    const auto twice = evolve_spectral(evolve_spectral(s, 150.0, 300.0, kP), 250.0, 100.0, kP);
    double worst = 0;
    for (std::size_t i = 0; i < once.values().size(); ++i)
      worst = std::max(worst, std::abs(once.values()[i] - twice.values()[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("conditioning on the grid") {
  SUBCASE("Gaussian aperture reproduces the closed form") {
    const double eps = 0.065, L1 = 500.0;
    const auto g = auto_grid(kA043, 2.0, L1, eps, kP, 2048);
    const auto e = evolve_spectral(build_grid_state(kA043, 2.0, g), L1, L1, kP);
    const auto phi = condition(e, Aperture::gaussian(eps));
    const cplx want =
        condition_on_gaussian_slit(make_epr_state(kA043, 2.0), SlitSpec::gaussian(eps), PropagationLeg(L1), kP).gamma();
    const cplx got = estimate_gaussian_param(phi);
    CHECK(rel(got.real(), want.real()) < 1e-3);
    CHECK(rel(got.imag(), want.imag()) < 1e-3);
    CHECK(rel(widths(phi).gaussian_equiv_w, intensity_width(GaussianParam(want))) < 1e-3);
    CHECK(phi.weight > 0.0);
    CHECK(norm1d(phi) == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("separable state is unchanged by conditioning") {
    const auto s = build_grid_state(1.0, 0.5, GridSpec{512, 4.0});
    const double marginal = widths(marginal_particle2(s, 0.0, kP)).gaussian_equiv_w;
    for (const Aperture& ap : {Aperture::gaussian(0.05), Aperture::rect(0.3), Aperture::double_slit(0.1, 0.5)}) {
      CHECK(rel(widths(condition(s, ap)).gaussian_equiv_w, marginal) < 1e-3);
    }
  }
  SUBCASE("rect aperture against an erf quadrature") {
    // Source amplitude exp(-u^2/a^2 - v^2/(4 Omega^2)); the y1 integral over |y1| <= h is an erf pair.
    const double omega = 1.0, h = 0.08;
    const double A = 1.0 / 0.043 + 0.25 / (omega * omega);
    const auto amp = [&](double y2) {
      const double b = y2 * (1.0 / 0.043 - 0.25 / (omega * omega)) / A;
      return (std::erf(std::sqrt(A) * (h - b)) + std::erf(std::sqrt(A) * (h + b))) *
             std::exp(A * b * b - A * y2 * y2);
    };
    double m0 = 0, m2 = 0;
    for (int j = -40000; j <= 40000; ++j) {
      const double y = j * 5e-5, p = amp(y) * amp(y);
      m0 += p;
      m2 += p * y * y;
    }
    const double want = 2.0 * std::sqrt(m2 / m0);
    // The slit edges fall midway between samples so the sampled aperture is exactly 0.16 wide.
    const double dy = h / 19.5;
    const auto s = build_grid_state(kA043, omega, GridSpec{2048, 1024 * dy});
    const double w = widths(condition(s, Aperture::rect(2 * h))).gaussian_equiv_w;
    CHECK(rel(w, want) < 1e-3);
    CHECK(w > h);
    CHECK(w < beam_width(make_epr_state(kA043, omega), PropagationLeg(0.0), kP));
  }
  SUBCASE("vanishing weight") {
    const auto s = build_grid_state(kA043, 2.0, GridSpec{512, 14.0});
    CHECK_THROWS_AS(condition(s, Aperture::point(13.0, 0.01)), DegenerateConditioning);
  }
  SUBCASE("aperture parameters") {
    CHECK_THROWS_AS(Aperture::gaussian(0.0), DomainError);
    CHECK_THROWS_AS(Aperture::rect(-1.0), DomainError);
    CHECK_THROWS_AS(Aperture::double_slit(0.2, 0.1), DomainError);
    CHECK_THROWS_AS(Aperture::point(0.0, 0.0), DomainError);
  }
}

TEST_CASE("width extraction") {
  SUBCASE("Gaussian W = 1") {
    const std::size_t n = 4096;
    const double dy = 16.0 / n;
    Intensity1D p{std::vector<double>(n), dy};
    for (std::size_t j = 0; j < n; ++j) p.values[j] = std::exp(-2 * p.coordinate(j) * p.coordinate(j));
    const auto w = widths(p);
    CHECK(w.rms == Approx(0.5).epsilon(1e-3));
    CHECK(w.fwhm == Approx(1.17741).epsilon(1e-3));
    CHECK(w.gaussian_equiv_w == Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(w.multimodal);
  }
  SUBCASE("two lobes are flagged") {
    const std::size_t n = 2048;
    const double dy = 10.0 / n;
    Intensity1D p{std::vector<double>(n), dy};
    for (std::size_t j = 0; j < n; ++j) {
      const double y = p.coordinate(j);
      p.values[j] = std::exp(-8 * (y - 1) * (y - 1)) + 0.7 * std::exp(-8 * (y + 1) * (y + 1));
    }
    const auto w = widths(p);
    CHECK(w.multimodal);
    CHECK(w.fwhm == Approx(std::sqrt(2 * std::log(2.0)) * 0.5).epsilon(0.01));
  }
}

TEST_CASE("ghost double slit") {
  SUBCASE("fringes follow the unfolded Young distance") {
    const auto r = run_ghost_double_slit(0.04, 5.0, 0.15, 0.47, 600.0, 200.0, 600.0, kP);
    CHECK(r.fringes.fringe_spacing > 0.0);
    CHECK(rel(r.fringes.fringe_spacing, r.expected_spacing) < 0.05);
    CHECK(r.fringes.visibility > 0.5);
    CHECK(widths(r.fringes.pattern).multimodal);
    CHECK(r.fringes.coincidence_fraction > 0.0);

    SUBCASE("separable state shows none") {
      const auto sep = run_ghost_double_slit(1.0, 0.5, 0.15, 0.47, 600.0, 200.0, 600.0, kP, r.grid);
      CHECK(sep.fringes.visibility < 0.05);
    }
  }
  SUBCASE("single slit envelope") {
    for (double w : {0.1, 0.15, 0.3}) {
      const auto g = auto_grid(0.04, 5.0, 600.0, w / 2, kP);
      const auto st = evolve_spectral(build_grid_state(0.04, 5.0, g), 600.0, 600.0, kP);
      const auto f = ghost_double_slit(st, Aperture::rect(w), 200.0, 600.0, kP);
      const double eps = SlitSpec::rectangular(w, SlitConvention::diffraction_matched).gaussian_epsilon();
      CHECK(rel(widths(f.pattern).fwhm, virtual_slit_fwhm(eps, 0.04, 1800.0, kP)) < 0.10);
      CHECK_FALSE(widths(f.pattern).multimodal);
    }
  }
}

TEST_CASE("determinism and the no-signaling bound") {
  const auto g = auto_grid(0.3, 1.0, 300.0, 0.1, kP);
  const auto run = [&] {
    const auto e = evolve_spectral(build_grid_state(0.3, 1.0, g), 300.0, 300.0, kP);
    const auto c = widths(propagate(condition(e, Aperture::gaussian(0.1)), 400.0, kP)).fwhm;
    const auto b = widths(marginal_particle2(e, 400.0, kP)).fwhm;
    return std::pair{c, b};
  };
  const auto [c1, b1] = run();
  const auto [c2, b2] = run();
  CHECK(c1 == c2);
  CHECK(b1 == b2);
  CHECK(c1 <= b1);
}

TEST_CASE("grid cap from the environment") {
  setenv("POPPER_SIM_MAX_GRID", "512", 1);
  CHECK(max_grid_points() == 512);
  CHECK_THROWS_AS(auto_grid(kA043, 2.0, 500.0, 0.065, kP, 1024), ResolutionError);
  unsetenv("POPPER_SIM_MAX_GRID");
  CHECK(max_grid_points() == kDefaultMaxGridPoints);
}
