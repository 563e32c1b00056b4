#include <cmath>

#include <doctest.h>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hsh/errors.hpp"
#include "hsh/exponents.hpp"
#include "hsh/spectra.hpp"
#include "support/fd_oracle.hpp"

using namespace hsh;
using spectra::HarmonicKind;

TEST_SUITE_BEGIN("spectra");

TEST_CASE("lowest eigenvalue is Lambda(alpha_plus)") {
  for (auto [n, mu] : {std::pair{3, 3.0 / 16.0}, {2, -1.0}, {5, 0.2}, {4, -5.0}}) {
    const auto t = derive_exponents({n, mu, {}});
    const double expect = t.lambda(t.alpha_plus);
    const auto e = spectra::eigenvalue(n, mu, 1, 0);
    CHECK(e.Lambda_sm == doctest::Approx(expect).epsilon(1e-9));
    CHECK(e.node_count == 0);
  }
  // the worked value 0.75 * 1.75
  const auto e = spectra::eigenvalue(3, 3.0 / 16.0, 1, 0);
  CHECK(e.Lambda_sm == doctest::Approx(1.3125).epsilon(1e-9));
}

TEST_CASE("n=2, mu=0 spectrum is (2s-1)^2") {
  for (int s = 1; s <= 3; ++s) {
    const auto e = spectra::eigenvalue(2, 0.0, s, 0);
    const double expect = (2.0 * s - 1.0) * (2.0 * s - 1.0);
    CHECK(e.Lambda_sm == doctest::Approx(expect).epsilon(1e-7));
    CHECK(e.node_count == s - 1);
  }
}

TEST_CASE("n=3, mu=0, (s,m)=(1,1) is the degree-2 spherical harmonic") {
  const auto e = spectra::eigenvalue(3, 0.0, 1, 1);
  CHECK(e.Lambda_sm == doctest::Approx(6.0).epsilon(1e-7));
  // eigenfunction proportional to t sqrt(1-t^2)
  auto oracle = [](double t) { return t * std::sqrt(1.0 - t * t); };
  const double scale = e.profile.value(0.5) / oracle(0.5);
  for (double t : {0.05, 0.2, 0.4, 0.6, 0.8, 0.97}) {
    CHECK(e.profile.value(t) == doctest::Approx(scale * oracle(t)).epsilon(1e-7));
  }
  // vanishes on the axis for m != 0
  CHECK(e.profile.value(1.0) == 0.0);
}

TEST_CASE("shooting matches the graded finite-difference matrix oracle") {
  for (auto [n, mu] : {std::pair{3, 0.1}, {4, -1.0}}) {
    const auto fd = hsh_tests::fd_eigenvalues(n, mu, 0, 3);
    for (int s = 1; s <= 3; ++s) {
      const auto e = spectra::eigenvalue(n, mu, s, 0);
      CHECK(e.Lambda_sm == doctest::Approx(fd[s - 1]).epsilon(1e-5));
    }
  }
}

TEST_CASE("interlacing in s and monotonicity in m") {
  double prev = 0.0;
  for (int s = 1; s <= 3; ++s) {
    const auto e = spectra::eigenvalue(3, -1.0, s, 0);
    CHECK(e.Lambda_sm > prev + 1e-8);
    prev = e.Lambda_sm;
  }
  prev = 0.0;
  for (int m = 0; m <= 3; ++m) {
    const auto e = spectra::eigenvalue(4, 0.1, 1, m);
    CHECK(e.Lambda_sm > prev + 1e-8);
    prev = e.Lambda_sm;
  }
}

TEST_CASE("eigenfunction endpoint behavior and normalization") {
  const auto e = spectra::eigenvalue(3, -0.6, 2, 0);
  CHECK(e.profile.B == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(e.profile.A) <= 1e-6 * (std::abs(e.profile.A) + std::abs(e.profile.B)));
  // phi / t^{alpha_+} tends to the leading coefficient
  const auto t = derive_exponents({3, -0.6, {}});
  for (double tt : {1e-4, 1e-3, 1e-2}) {
    CHECK(e.profile.value(tt) / std::pow(tt, t.alpha_plus) ==
          doctest::Approx(1.0).epsilon(1e-2));
  }
  // exactly one interior sign change for s = 2
  int changes = 0;
  for (size_t i = 0; i + 1 < e.profile.grid.size(); ++i)
    if (e.profile.y[i] * e.profile.y[i + 1] < 0) ++changes;
  CHECK(changes == 1);
}

TEST_CASE("eigenfunctions are orthogonal in the sigma/(1-t^2) weight") {
  const int n = 3;
  const double mu = 0.1;
  const auto e1 = spectra::eigenvalue(n, mu, 1, 0);
  const auto e2 = spectra::eigenvalue(n, mu, 2, 0);
  boost::math::quadrature::tanh_sinh<double> quad(10);
  auto w = [&](double t) { return std::pow((1.0 - t) * (1.0 + t), 0.5 * (n - 3)); };
  const double ip = quad.integrate(
      [&](double t) { return w(t) * e1.profile.value(t) * e2.profile.value(t); }, 0.0, 1.0);
  const double n1 = quad.integrate(
      [&](double t) { return w(t) * e1.profile.value(t) * e1.profile.value(t); }, 0.0, 1.0);
  const double n2 = quad.integrate(
      [&](double t) { return w(t) * e2.profile.value(t) * e2.profile.value(t); }, 0.0, 1.0);
  CHECK(std::abs(ip) / std::sqrt(n1 * n2) < 1e-7);
}

TEST_CASE("eigenvalues_up_to collects the leading spectrum") {
  const auto lams = spectra::eigenvalues_up_to(2, 0.0, 0, 30.0);
  REQUIRE(lams.size() == 3);
  CHECK(lams[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(lams[1] == doctest::Approx(9.0).epsilon(1e-7));
  CHECK(lams[2] == doctest::Approx(25.0).epsilon(1e-7));
}

TEST_CASE("m > 0 with n = 2 is rejected") {
  CHECK_THROWS_AS(spectra::eigenvalue(2, 0.0, 1, 1), std::invalid_argument);
}

TEST_CASE("closed-form harmonics") {
  const int n = 4;
  const double mu = -0.3;
  const auto tab = derive_exponents({n, mu, {}});
  const auto hp = spectra::harmonic(HarmonicKind::h_plus, n, mu);
  const auto hm = spectra::harmonic(HarmonicKind::h_minus, n, mu);
  CHECK(hp.closed_form);
  CHECK(hm.closed_form);
  CHECK(hp.positive);
  std::vector<double> x = {0.4, 0.7, -0.2, 0.5};
  const double r = std::sqrt(0.16 + 0.49 + 0.04 + 0.25);
  CHECK(hp.value_cartesian(x) == doctest::Approx(std::pow(0.4, tab.alpha_plus)).epsilon(1e-13));
  CHECK(hm.value_cartesian(x) ==
        doctest::Approx(std::pow(0.4, tab.alpha_plus) *
                        std::pow(r, -(n - 2 + 2 * tab.alpha_plus)))
            .epsilon(1e-13));

  spectra::HarmonicExtra extra;
  extra.gamma = tab.alpha_minus;
  const auto Ham = spectra::harmonic(HarmonicKind::H_plus, n, mu, extra);
  CHECK(Ham.closed_form);
  CHECK(Ham.value_cartesian(x) == doctest::Approx(std::pow(0.4, tab.alpha_minus)).epsilon(1e-13));
  const auto Hrefl = spectra::harmonic(HarmonicKind::H_minus, n, mu, extra);
  CHECK(Hrefl.value_cartesian(x) ==
        doctest::Approx(std::pow(0.4, tab.alpha_minus) *
                        std::pow(r, -(n - 2 + 2 * tab.alpha_minus)))
            .epsilon(1e-13));
}

TEST_CASE("H_plus for n=2, mu=0 is r^gamma cos(gamma phi)") {
  spectra::HarmonicExtra extra;
  extra.gamma = 0.5;
  const auto H = spectra::harmonic(HarmonicKind::H_gamma, 2, 0.0, extra);
  CHECK(H.positive);
  for (double phi : {0.1, 0.7, 1.3}) {
    const double t = std::cos(phi);
    for (double r : {0.5, 2.0}) {
      CHECK(H.value(r, t) ==
            doctest::Approx(std::sqrt(r) * std::cos(0.5 * phi)).epsilon(1e-8));
    }
  }
}

TEST_CASE("eigenfunction harmonics with (s,m) != (1,0) change sign") {
  spectra::HarmonicExtra extra;
  extra.s = 2;
  extra.m = 0;
  const auto h = spectra::harmonic(HarmonicKind::h_plus, 3, 0.1, extra);
  CHECK(!h.closed_form);
  CHECK(!h.positive);
  const auto tab = derive_exponents({3, 0.1, {}});
  const auto e = spectra::eigenvalue(3, 0.1, 2, 0);
  CHECK(h.gamma == doctest::Approx(e.gamma_plus));
  CHECK(h.gamma > tab.alpha_plus);
}

TEST_CASE("H_gamma positivity range is enforced") {
  spectra::HarmonicExtra extra;
  extra.gamma = 5.0;
  CHECK_THROWS_AS(spectra::harmonic(HarmonicKind::H_gamma, 3, 0.0, extra), GammaOutOfRange);
}

TEST_CASE("growth bounds") {
  // H_{alpha_-} at mu=0: alpha_- = 0 and the ratio is identically 1
  spectra::HarmonicExtra extra;
  const auto tab = derive_exponents({3, 0.0, {}});
  extra.gamma = tab.alpha_minus;
  const auto H = spectra::harmonic(HarmonicKind::H_plus, 3, 0.0, extra);
  auto rep = spectra::verify_growth_bounds(H, tab.alpha_minus);
  CHECK(rep.pass);
  CHECK(rep.c_best == doctest::Approx(1.0).epsilon(1e-9));

  // numerical H_gamma at n=3, mu=3/16, gamma=0
  spectra::HarmonicExtra e2;
  e2.gamma = 0.0;
  const auto H2 = spectra::harmonic(HarmonicKind::H_gamma, 3, 3.0 / 16.0, e2);
  auto rep2 = spectra::verify_growth_bounds(H2, 0.0);
  CHECK(rep2.pass);
  CHECK(std::isfinite(rep2.c_best));
  CHECK(rep2.c_best >= 1.0);

  // h_plus against the alpha_- envelope must fail: the ratio sinks to 0
  const auto hp = spectra::harmonic(HarmonicKind::h_plus, 3, 3.0 / 16.0);
  const auto tab2 = derive_exponents({3, 3.0 / 16.0, {}});
  auto rep3 = spectra::verify_growth_bounds(hp, tab2.alpha_plus);
  CHECK(!rep3.pass);
  CHECK(rep3.slope_low_t > 0.1);
}

TEST_SUITE_END();
