#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "nwraman/errors.hpp"
#include "nwraman/features.hpp"
#include "nwraman/rcf_model.hpp"
#include "oracles.hpp"

using namespace nwraman;

namespace {

constexpr double kA = 0.69e5;
constexpr double kB = 0.195e5;
constexpr double kLattice = 0.5658;

std::vector<double> band() { return oracle::axis(250.0, 320.0, 0.1); }

PeakFeatures simulated_features(double d, const RcfParams& p) {
  return extract_features(simulate_spectrum({band(), d, p}));
}

}  // namespace

TEST_CASE("dispersion: zone-center and zone-boundary values") {
  RcfParams p;
  // mpmath, 30 digits: sqrt(88500), sqrt(49500).
  CHECK(dispersion_omega(0.0, p) == doctest::Approx(297.489495612870337).epsilon(1e-15));
  CHECK(dispersion_omega(1.0, p) == doctest::Approx(222.485954612869888).epsilon(1e-15));
  CHECK(dispersion_omega(0.0, p) == doctest::Approx(297.49).epsilon(0.01 / 297.49));
  CHECK(dispersion_omega(1.0, p) == doctest::Approx(222.49).epsilon(0.01 / 222.49));
}

TEST_CASE("dispersion: C shifts every value by exactly C") {
  RcfParams p;
  RcfParams q = p;
  q.C = 3.0;
  CHECK(dispersion_omega(0.0, q) == doctest::Approx(300.49).epsilon(0.01 / 300.49));
  for (double xi : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    CHECK(dispersion_omega(xi, q) - dispersion_omega(xi, p) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("dispersion: strictly decreasing on [0, 1] and domain-checked") {
  RcfParams p;
  double prev = dispersion_omega(0.0, p);
  for (int i = 1; i <= 1000; ++i) {
    const double v = dispersion_omega(i / 1000.0, p);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(dispersion_omega(-1e-9, p), DomainError);
  CHECK_THROWS_AS(dispersion_omega(1.0 + 1e-9, p), DomainError);
}

TEST_CASE("confinement: closed-form values") {
  RcfParams p;
  CHECK(confinement_weight(0.0, 5.0, p) == 1.0);
  CHECK(confinement_weight(0.0, 500.0, p) == 1.0);
  // mpmath: exp(-(5/0.5658)^2/4)
  CHECK(confinement_weight(1.0, 5.0, p) == doctest::Approx(3.3198686879027277e-9).epsilon(1e-12));
  CHECK_THROWS_AS(confinement_weight(0.5, 0.0, p), DomainError);
  CHECK_THROWS_AS(confinement_weight(0.5, -2.0, p), DomainError);
}

TEST_CASE("confinement: depends only on xi * D (property)") {
  RcfParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::uniform_real_distribution<double> ud(1.0, 40.0);
  for (int i = 0; i < 500; ++i) {
    const double xi = u(rng), d = ud(rng);
    CHECK(confinement_weight(xi, 2.0 * d, p) == doctest::Approx(confinement_weight(2.0 * xi, d, p)).epsilon(1e-12));
  }
}

TEST_CASE("confinement: strictly decreasing in xi and in D") {
  RcfParams p;
  for (double d : {3.0, 8.0, 20.0}) {
    for (int i = 1; i <= 100; ++i) {
      CHECK(confinement_weight(i / 100.0, d, p) < confinement_weight((i - 1) / 100.0, d, p));
    }
  }
  for (double xi : {0.01, 0.1, 0.3}) {
    for (int k = 1; k < 40; ++k) {
      CHECK(confinement_weight(xi, 1.0 + k, p) < confinement_weight(xi, 1.0 * k, p));
    }
  }
}

TEST_CASE("params: validation") {
  RcfParams p;
  CHECK_NOTHROW(p.validate());
  RcfParams bad = p;
  bad.B = bad.A;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.B = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.gamma0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.quad_nodes = 63;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.lattice_a = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK(geometry_from_string("column2d") == Geometry::column2d);
  CHECK_THROWS_AS(geometry_from_string("cube"), ValidationError);
}

TEST_CASE("intensity: matches high-precision quadrature values") {
  // Frozen from mpmath.quad at 30 digits on 200 panels (Gamma0 = 3, C = 0).
  struct Case {
    Geometry g;
    double d, omega, expected;
  };
  const Case cases[] = {
      {Geometry::sphere3d, 5, 230, 0.000024075664298451844825},
      {Geometry::sphere3d, 5, 285, 0.0048579981200176371375},
      {Geometry::sphere3d, 5, 292, 0.0066153958659347133134},
      {Geometry::sphere3d, 5, 296.5, 0.0041408113127115365869},
      {Geometry::sphere3d, 5, 300, 0.00092025836319958309721},
      {Geometry::sphere3d, 20, 230, 2.2654185853989212741e-7},
      {Geometry::sphere3d, 20, 285, 7.2983141638114080405e-6},
      {Geometry::sphere3d, 20, 292, 0.00004373789769425627411},
      {Geometry::sphere3d, 20, 296.5, 0.00038838597848690903183},
      {Geometry::sphere3d, 20, 300, 0.000081903424621909434225},
      {Geometry::column2d, 5, 230, 0.000049143778236582577906},
      {Geometry::column2d, 5, 285, 0.0092353701314039015723},
      {Geometry::column2d, 5, 292, 0.018793018806805145852},
      {Geometry::column2d, 5, 296.5, 0.020656142752961762862},
      {Geometry::column2d, 5, 300, 0.0042689388667356799992},
      {Geometry::column2d, 20, 230, 2.2414521311242715223e-6},
      {Geometry::column2d, 20, 285, 0.000069487940512092810407},
      {Geometry::column2d, 20, 292, 0.00038652219317293058779},
      {Geometry::column2d, 20, 296.5, 0.003751131361264576556},
      {Geometry::column2d, 20, 300, 0.00091818770965260216664},
  };
  for (const auto& c : cases) {
    RcfParams p;
    p.geometry = c.g;
    CAPTURE(c.d);
    CAPTURE(c.omega);
    CHECK(rcf_intensity(c.omega, c.d, p) == doctest::Approx(c.expected).epsilon(1e-10));
  }
}

TEST_CASE("intensity: agrees with adaptive Gauss-Kronrod away from the frozen points") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uo(240.0, 310.0), ud(3.0, 50.0);
  for (int i = 0; i < 40; ++i) {
    RcfParams p;
    p.geometry = i % 2 ? Geometry::column2d : Geometry::sphere3d;
    p.C = 1.7;
    p.gamma0 = 2.5;
    const double om = uo(rng), d = ud(rng);
    const double ref = oracle::rcf_adaptive(om, d, kA, kB, 1.7, 2.5, kLattice, p.geometry == Geometry::sphere3d);
    CHECK(rcf_intensity(om, d, p) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("intensity: positive everywhere, including far outside the band") {
  RcfParams p;
  for (double om : {-1e4, 0.0, 100.0, 222.0, 297.5, 400.0, 1e5}) {
    for (double d : {1.0, 5.0, 50.0, 500.0}) CHECK(rcf_intensity(om, d, p) > 0.0);
  }
}

TEST_CASE("intensity: doubling nodes 1024 -> 2048 changes values by < 1e-8") {
  for (Geometry g : {Geometry::sphere3d, Geometry::column2d}) {
    RcfParams p1024;
    p1024.geometry = g;
    p1024.quad_nodes = 1024;
    RcfParams p2048 = p1024;
    p2048.quad_nodes = 2048;
    RcfParams p4096 = p1024;
    p4096.quad_nodes = 4096;
    const auto grid = band();
    for (double d : {5.0, 20.0}) {
      const auto a = RcfKernel(p1024).profile(grid, d);
      const auto b = RcfKernel(p2048).profile(grid, d);
      const auto c = RcfKernel(p4096).profile(grid, d);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) < 1e-8 * b[i]);
        CHECK(std::abs(c[i] - b[i]) < 1e-8 * b[i]);
      }
    }
  }
}

TEST_CASE("intensity: kernel profile equals pointwise evaluation bit for bit") {
  RcfParams p;
  const RcfKernel k(p);
  const std::vector<double> grid{260.0, 290.25, 297.0, 301.0};
  const auto prof = k.profile(grid, 7.5);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(prof[i] == rcf_intensity(grid[i], 7.5, p));
}

TEST_CASE("intensity: D = 100a at omega(0) is within 1% of the Lorentzian after normalization") {
  RcfParams p;
  const double d = 100.0 * p.lattice_a;
  const auto grid = band();
  const auto model = RcfKernel(p).normalized_profile(grid, d);
  const double w0 = p.bulk_peak_position();
  double lpeak = 0.0;
  for (double x : grid) lpeak = std::max(lpeak, oracle::lorentzian(x, w0, p.gamma0));
  // Grid point nearest omega(0).
  const auto it = std::min_element(grid.begin(), grid.end(),
                                   [&](double a, double b) { return std::abs(a - w0) < std::abs(b - w0); });
  const auto i = static_cast<std::size_t>(it - grid.begin());
  CHECK(std::abs(model[i] - oracle::lorentzian(grid[i], w0, p.gamma0) / lpeak) < 0.01);
}

TEST_CASE("intensity: Lorentzian limit is approached as D grows") {
  // At D = 1000a the zone-centre sampling is tight enough for the bulk limit.
  RcfParams p;
  const auto grid = oracle::axis(280.0, 315.0, 0.05);
  const auto model = simulate_spectrum({grid, 1000.0 * p.lattice_a, p});
  const auto f = extract_features(model);
  CHECK(f.position == doctest::Approx(p.bulk_peak_position()).epsilon(0.005 / 297.5));
  CHECK(f.fwhm == doctest::Approx(p.gamma0).epsilon(0.01));
  double dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dev = std::max(dev, std::abs(model.intensities()[i] - oracle::lorentzian(grid[i], p.bulk_peak_position(), p.gamma0)));
  }
  CHECK(dev < 0.01);
}

TEST_CASE("simulated peaks shift down, broaden and skew as D shrinks (property)") {
  for (Geometry g : {Geometry::sphere3d, Geometry::column2d}) {
    RcfParams p;
    p.geometry = g;
    double prev_pos = -1e9, prev_fwhm = 1e9;
    for (int i = 0; i < 20; ++i) {
      const double d = 3.0 + (50.0 - 3.0) * i / 19.0;
      const auto f = simulated_features(d, p);
      CAPTURE(d);
      CHECK(f.position >= prev_pos);
      CHECK(f.fwhm <= prev_fwhm);
      CHECK(f.asymmetry >= 1.0);
      CHECK(f.position < p.bulk_peak_position());
      prev_pos = f.position;
      prev_fwhm = f.fwhm;
    }
  }
}

TEST_CASE("simulate: 5 nm peak below 20 nm peak, both below the bulk position") {
  RcfParams p;
  const auto f5 = simulated_features(5.0, p);
  const auto f20 = simulated_features(20.0, p);
  CHECK(f5.position < f20.position);
  CHECK(f20.position < p.bulk_peak_position());
  CHECK(f5.asymmetry > 1.0);
}

TEST_CASE("simulate: a point distribution equals the single-diameter simulation") {
  RcfParams p;
  const auto a = simulate_spectrum({band(), 8.0, p});
  const auto b = simulate_spectrum({band(), DiameterDistribution::point(8.0), p});
  const auto c = simulate_spectrum({band(), DiameterDistribution::grid({8.0}, {1.0}), p});
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("simulate: uniform [7, 9] peak lies between the D=7 and D=9 peaks") {
  RcfParams p;
  const auto grid = band();
  const auto f7 = extract_features(simulate_spectrum({grid, 7.0, p}));
  const auto f9 = extract_features(simulate_spectrum({grid, 9.0, p}));
  const auto mix = simulate_spectrum({grid, DiameterDistribution::uniform_interval(7.0, 9.0), p});
  const auto fm = extract_features(mix);
  CHECK(fm.position > f7.position);
  CHECK(fm.position < f9.position);
  CHECK(fm.fwhm < f7.fwhm);
  CHECK(fm.fwhm > f9.fwhm);
  CHECK(*std::max_element(mix.intensities().begin(), mix.intensities().end()) == 1.0);
}

TEST_CASE("simulate: D = 4.5 nm is shifted, broadened and asymmetric against bulk") {
  RcfParams p;
  const auto bulk = simulated_features(1000.0 * p.lattice_a, p);
  const auto f = simulated_features(4.5, p);
  CHECK(f.position < bulk.position - 3.0);
  CHECK(f.fwhm > 3.0 * bulk.fwhm);
  CHECK(f.asymmetry > 1.5);
  CHECK(bulk.asymmetry == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("simulate: invalid diameter propagates as a domain error") {
  RcfParams p;
  CHECK_THROWS_AS(simulate_spectrum({band(), -1.0, p}), DomainError);
  CHECK_THROWS_AS(simulate_spectrum({band(), 0.0, p}), DomainError);
}

TEST_CASE("coverage warning fires only outside the recommended band") {
  RcfParams p;
  CHECK_FALSE(ModelSpectrumRequest{band(), 5.0, p}.coverage_warning());
  CHECK(ModelSpectrumRequest{oracle::axis(100.0, 320.0, 1.0), 5.0, p}.coverage_warning());
  CHECK(ModelSpectrumRequest{oracle::axis(250.0, 400.0, 1.0), 5.0, p}.coverage_warning());
}

TEST_CASE("calibrate_C: synthetic bulk Lorentzian sets C and gamma0") {
  RcfParams p;
  const auto x = oracle::axis(280.0, 320.0, 0.1);
  const auto cal = calibrate_C(Spectrum(x, oracle::sample(x, 300.5, 3.0, 40.0)), p);
  // 300.5 - sqrt(88500)
  CHECK(cal.C == doctest::Approx(300.5 - 297.489495612870338).epsilon(1e-6));
  CHECK(cal.C == doctest::Approx(3.01).epsilon(0.01 / 3.01));
  CHECK(cal.gamma0 == doctest::Approx(3.0).epsilon(0.01 / 3.0));
  CHECK(cal.A == p.A);
  CHECK(cal.B == p.B);
}

TEST_CASE("calibrate_C: peak exactly at sqrt(A + B) gives C = 0") {
  RcfParams p;
  const double w0 = std::sqrt(p.A + p.B);
  const auto x = oracle::axis(275.0, 320.0, 0.1);
  const auto cal = calibrate_C(Spectrum(x, oracle::sample(x, w0, 4.2, 10.0)), p);
  CHECK(std::abs(cal.C) < 1e-8);
  CHECK(cal.gamma0 == doctest::Approx(4.2).epsilon(1e-8));
}

TEST_CASE("calibrate_C: spectrum without a peak propagates the extraction error") {
  RcfParams p;
  const auto x = oracle::axis(280.0, 320.0, 0.5);
  std::vector<double> ramp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ramp[i] = x[i];
  CHECK_THROWS_AS(calibrate_C(Spectrum(x, ramp), p), NoPeakError);
}

TEST_CASE("fit_lorentzian recovers an offset Lorentzian") {
  const auto x = oracle::axis(270.0, 330.0, 0.25);
  const auto fit = fit_lorentzian(Spectrum(x, oracle::sample(x, 299.37, 5.5, 12.0, 0.4)));
  CHECK(fit.center == doctest::Approx(299.37).epsilon(1e-9));
  CHECK(fit.fwhm == doctest::Approx(5.5).epsilon(1e-8));
  CHECK(fit.amplitude == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(fit.offset == doctest::Approx(0.4).epsilon(1e-7));
}
