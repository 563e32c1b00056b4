#include <cmath>

#include <doctest.h>

#include "hsh/errors.hpp"
#include "hsh/frobenius.hpp"

using namespace hsh;

TEST_SUITE_BEGIN("frobenius");

TEST_CASE("t^{alpha_+} is an exact series when Lambda = Lambda(alpha_+)") {
  const int n = 4;
  const double mu = -2.0;
  const double ap = 0.5 + std::sqrt(0.25 - mu);
  const LinearAngularODE ode{n, mu, 0.0, ap * (ap + n - 2)};
  const auto e = frobenius::expand(ode, 0, ap, 12);
  CHECK(e.coeffs[0] == 1.0);
  for (size_t j = 1; j < e.coeffs.size(); ++j) CHECK(std::abs(e.coeffs[j]) <= 1e-13);
}

TEST_CASE("regular-branch slope at t=1 matches (mu+Lambda)/(n-1)") {
  const LinearAngularODE ode{2, 0.0, 0.0, 0.25};
  const auto e = frobenius::expand(ode, 1, 0.0, 12);
  // k(t) = sum b_j (1-t)^j, so dk/dt(1) = -b_1 and k(1) = b_0 = 1
  CHECK(-e.coeffs[1] == doctest::Approx(0.25).epsilon(1e-13));

  // closed-form cross-check: d/dt cos(gamma arccos t) -> gamma^2 at t=1
  const double gamma = 0.5;
  const double h = 1e-7;
  const double fd =
      (std::cos(gamma * std::acos(1.0 - 0.0)) - std::cos(gamma * std::acos(1.0 - h))) / h;
  CHECK(-e.coeffs[1] == doctest::Approx(fd).epsilon(1e-5));
  CHECK(fd == doctest::Approx(gamma * gamma).epsilon(1e-5));
}

TEST_CASE("kappa_+ branch vanishes at t=1 when nu > 0") {
  const LinearAngularODE ode{4, 0.05, 3.0, 2.0};
  double kp, km;
  frobenius::indicial_roots(ode, 1, kp, km);
  CHECK(kp > 0);
  const auto e = frobenius::expand(ode, 1, kp, 10);
  CHECK(e.value(0.0) == 0.0);
}

TEST_CASE("series residual decays at the expected order") {
  const int order = 10;
  const LinearAngularODE ode{3, -1.5, 0.0, 2.3};
  double ap, am;
  frobenius::indicial_roots(ode, 0, ap, am);
  const auto e = frobenius::expand(ode, 0, ap, order);

  auto residual = [&](double t) {
    return ode.residual(t, e.value(t), e.derivative(t), e.second_derivative(t));
  };
  const double r = 0.2;
  const double r1 = std::abs(residual(r / 2));
  const double r2 = std::abs(residual(r / 4));
  // truncation leaves O(t^{exponent + order - 1}); halving t divides it by
  // about 2^{exponent + order - 1}
  const double expected = std::pow(2.0, ap + order - 1.0);
  CHECK(r1 / r2 > 0.2 * expected);
  CHECK(r1 / r2 < 5.0 * expected);
}

TEST_CASE("integer-separated roots raise ResonantIndices") {
  // mu = -3/4 gives alpha_+ - alpha_- = 2, hitting the recurrence at step 2
  const LinearAngularODE ode{3, -0.75, 0.0, 1.0};
  double ap, am;
  frobenius::indicial_roots(ode, 0, ap, am);
  CHECK(ap - am == doctest::Approx(2.0));
  CHECK_THROWS_AS(frobenius::expand(ode, 0, am, 8), ResonantIndices);
  // the larger root is always safe
  CHECK_NOTHROW(frobenius::expand(ode, 0, ap, 8));
}

TEST_CASE("non-root exponents are rejected") {
  const LinearAngularODE ode{3, 0.1, 0.0, 1.0};
  CHECK_THROWS_AS(frobenius::expand(ode, 0, 0.123, 6), std::invalid_argument);
}

TEST_SUITE_END();
