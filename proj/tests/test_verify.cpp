#include <cmath>
#include <random>

#include <doctest.h>

#include "hsh/errors.hpp"
#include "hsh/exponents.hpp"
#include "hsh/verify.hpp"

using namespace hsh;
using verify::FieldSampler;

namespace {

double norm(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

FieldSampler power_sampler(int n, double mu, double exponent) {
  FieldSampler f;
  f.n = n;
  f.mu = mu;
  f.eval = [exponent](std::span<const double> x) { return std::pow(x[0], exponent); };
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("verify");

TEST_CASE("exact solutions have tiny residuals, non-solutions do not") {
  const int n = 3;
  const double mu = -0.5;
  const auto tab = derive_exponents({n, mu, {}});
  auto hp = power_sampler(n, mu, tab.alpha_plus);
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> c(0.2, 1.5);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x = {c(rng), c(rng), c(rng)};
    const double h = 1e-3 * std::min(x[0], 1.0);
    CHECK(std::abs(verify::pde_residual(hp, x, h, false)) < 1e-6);
  }

  // U* with the nonlinearity on
  const double p = 2.0;
  FieldSampler ustar;
  ustar.n = n;
  ustar.mu = mu;
  ustar.p = p;
  const double C = *critical_constant({n, mu, p});
  ustar.eval = [C, p](std::span<const double> x) {
    return C * std::pow(x[0], -2.0 / (p - 1.0));
  };
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x = {c(rng), c(rng), c(rng)};
    const double h = 1e-3 * std::min(x[0], 1.0);
    CHECK(std::abs(verify::pde_residual(ustar, x, h, true)) < 1e-6);
  }

  // perturbed non-solution
  FieldSampler bad = hp;
  const double ap = tab.alpha_plus;
  bad.eval = [ap](std::span<const double> x) {
    return std::pow(x[0], ap) + 0.05 * x[0] * x[0];
  };
  std::vector<double> x = {0.7, 0.3, 0.2};
  CHECK(std::abs(verify::pde_residual(bad, x, 1e-3 * 0.7, false)) > 1e-3);
}

TEST_CASE("Richardson consistency: order-2 residual drops fourfold when h halves") {
  const int n = 4;
  const double mu = 0.12;
  const auto tab = derive_exponents({n, mu, {}});
  // h_minus has curvature in every direction; its truncation error is O(h^2)
  FieldSampler hm;
  hm.n = n;
  hm.mu = mu;
  const double ap = tab.alpha_plus;
  hm.eval = [n, ap](std::span<const double> x) {
    return std::pow(x[0], ap) * std::pow(norm(x), -(n - 2 + 2 * ap));
  };
  std::vector<double> x = {0.8, 0.5, 0.3, 0.2};
  const double h = 5e-3 * x[0];
  const double r1 = verify::pde_residual(hm, x, h, false, 2);
  const double r2 = verify::pde_residual(hm, x, 0.5 * h, false, 2);
  CHECK(std::abs(r1 / r2) > 3.0);
  CHECK(std::abs(r1 / r2) < 5.0);

  // the default order-4 stencil contracts roughly sixteenfold
  const double q1 = verify::pde_residual(hm, x, 4.0 * h, false);
  const double q2 = verify::pde_residual(hm, x, 2.0 * h, false);
  CHECK(std::abs(q1 / q2) > 10.0);
  CHECK(std::abs(q1 / q2) < 24.0);
}

TEST_CASE("stencil domain guard") {
  auto f = power_sampler(3, 0.0, 1.0);
  std::vector<double> x = {1e-4, 0.5, 0.5};
  CHECK_THROWS_AS(verify::pde_residual(f, x, 1e-3, false), StencilOutOfDomain);
  std::vector<double> x2 = {1.5e-3, 0.5, 0.5};  // order-4 reach is 2h
  CHECK_THROWS_AS(verify::pde_residual(f, x2, 1e-3, false), StencilOutOfDomain);
  CHECK_NOTHROW(verify::pde_residual(f, x2, 1e-3, false, 2));
}

TEST_CASE("Keller-Osserman supersolution constant and bound check") {
  const double c = verify::ko_supersolution_constant(3, 0.0, 2.0, 1.0, 0.01);
  CHECK(c >= 1.0);
  CHECK(std::isfinite(c));

  // dilation consistency: c(R=2) <= c(R=1) 2^{4/(p-1)}
  const double c2 = verify::ko_supersolution_constant(3, 0.0, 2.0, 2.0, 0.01);
  CHECK(c2 <= c * std::pow(2.0, 4.0 / (2.0 - 1.0)));

  // a large epsilon still terminates
  CHECK(std::isfinite(verify::ko_supersolution_constant(3, 0.0, 2.0, 1.0, 0.35)));

  // U* obeys the bound with its own constant
  const double p = 2.0;
  FieldSampler ustar;
  ustar.n = 3;
  ustar.mu = 0.0;
  ustar.p = p;
  const double C = *critical_constant({3, 0.0, p});
  ustar.eval = [C, p](std::span<const double> x) {
    return C * std::pow(x[0], -2.0 / (p - 1.0));
  };
  auto rep = verify::ko_bound_check(ustar, 3, 0.0, p, 1.0);
  CHECK(rep.pass);
  CHECK(rep.sup_product == doctest::Approx(C).epsilon(1e-9));

  // a deliberately over-sized candidate fails
  FieldSampler big = ustar;
  const double scale = 10.0 * rep.constant_found / C;
  big.eval = [C, p, scale](std::span<const double> x) {
    return scale * C * std::pow(x[0], -2.0 / (p - 1.0));
  };
  CHECK(!verify::ko_bound_check(big, 3, 0.0, p, 1.0).pass);
}

TEST_CASE("Phragmen-Lindelof harness") {
  const int n = 3;
  const double mu = 0.1;
  const auto tab = derive_exponents({n, mu, {}});

  auto good = power_sampler(n, mu, tab.alpha_plus);
  auto v1 = verify::phragmen_lindelof_check(good, 1.0, 0.5);
  CHECK(v1.hypothesis_a);
  CHECK(v1.hypothesis_b);
  CHECK(v1.conclusion_holds);

  // h = x1^{alpha_-}: hypothesis (b) fails (ratio tends to 1, not 0) and the
  // conclusion indeed fails
  auto large = power_sampler(n, mu, tab.alpha_minus);
  auto v2 = verify::phragmen_lindelof_check(large, 1.0, 0.5);
  CHECK(!v2.hypothesis_b);
  CHECK(!v2.conclusion_holds);

  // h = x1^{alpha_+} |x|^{-(n-2+2 alpha_+)}: (b) fails at the origin and the
  // conclusion fails there too
  FieldSampler hm;
  hm.n = n;
  hm.mu = mu;
  const double ap = tab.alpha_plus;
  hm.eval = [n, ap](std::span<const double> x) {
    return std::pow(x[0], ap) * std::pow(norm(x), -(n - 2 + 2 * ap));
  };
  auto v3 = verify::phragmen_lindelof_check(hm, 1.0, 0.5);
  CHECK(!v3.hypothesis_b);
  CHECK(!v3.conclusion_holds);
  CHECK(v3.hypothesis_a);  // away from the origin it is controlled
}

TEST_CASE("scaling map consistency") {
  const int n = 3;
  const double mu = -0.25;
  const double p = 2.0;
  FieldSampler ustar;
  ustar.n = n;
  ustar.mu = mu;
  ustar.p = p;
  const double C = *critical_constant({n, mu, p});
  ustar.eval = [C, p](std::span<const double> x) {
    return C * std::pow(x[0], -2.0 / (p - 1.0));
  };
  std::vector<std::vector<double>> pts = {{0.5, 0.2, 0.1}, {1.2, -0.4, 0.3}, {0.8, 0.0, 0.9}};
  // U* is a fixed point of the scaling map
  CHECK(verify::scaling_check(ustar, p, 2.0, pts) < 1e-6);

  // x1^{alpha_+} with the nonlinearity on: residual nonzero, but the scaling
  // relation still maps the normalized residuals onto each other
  const auto tab = derive_exponents({n, mu, {}});
  FieldSampler hp = power_sampler(n, mu, tab.alpha_plus);
  hp.p = p;
  std::vector<double> probe = {0.5, 0.2, 0.1};
  CHECK(std::abs(verify::pde_residual(hp, probe, 1e-3 * 0.5, true)) > 1e-3);
  CHECK(verify::scaling_check(hp, p, 2.0, pts) < 1e-5);
}

TEST_SUITE_END();
