#include "hsh/exponents.hpp"

#include <cmath>
#include <stdexcept>

#include "hsh/errors.hpp"

namespace hsh {

namespace {
constexpr double kCriticalTol = 1e-12;
}

void ProblemParams::validate() const {
  if (n < 2) throw std::invalid_argument("ProblemParams: n must be >= 2");
  if (!(mu < 0.25)) throw std::domain_error("ProblemParams: mu must be < 1/4");
  if (!std::isfinite(mu)) throw std::invalid_argument("ProblemParams: mu must be finite");
  if (p) {
    if (!(*p > 1.0) || !std::isfinite(*p))
      throw std::invalid_argument("ProblemParams: p must be finite and > 1");
  }
}

const char* to_string(PlusBranch b) {
  switch (b) {
    case PlusBranch::exists_unique: return "exists_unique";
    case PlusBranch::nonexistent: return "nonexistent";
    case PlusBranch::critical: return "critical";
  }
  return "?";
}

const char* to_string(MinusBranch b) {
  switch (b) {
    case MinusBranch::exists: return "exists";
    case MinusBranch::nonexistent_KO: return "nonexistent_KO";
    case MinusBranch::critical: return "critical";
  }
  return "?";
}

ExponentTable derive_exponents(const ProblemParams& params) {
  params.validate();
  ExponentTable t;
  t.n = params.n;
  t.mu = params.mu;
  const double disc = std::sqrt(0.25 - params.mu);
  t.alpha_plus = 0.5 + disc;
  t.alpha_minus = 0.5 - disc;
  t.mu_star = -0.25 * params.n * (params.n - 2);
  t.p_c = 1.0 + 2.0 / (params.n - 2 + t.alpha_plus);
  t.p_KO = params.mu >= 0 ? kInf : 1.0 - 2.0 / t.alpha_minus;
  const double dm = params.n - 2 + t.alpha_minus;
  t.p_c_minus = dm > 0 ? 1.0 + 2.0 / dm : kInf;
  if (params.p) t.C_pmu = critical_constant(params);
  return t;
}

std::optional<double> critical_constant(const ProblemParams& params) {
  params.validate();
  if (!params.p) throw std::invalid_argument("critical_constant: p required");
  const double p = *params.p;
  const double radicand = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)) + params.mu;
  if (radicand < 0) return std::nullopt;
  if (radicand == 0) return 0.0;
  return std::pow(radicand, 1.0 / (p - 1.0));
}

SpectralIndices angular_indices(int n, double mu, int m, double Lambda) {
  if (n < 2) throw std::invalid_argument("angular_indices: n must be >= 2");
  if (!(mu < 0.25)) throw std::domain_error("angular_indices: mu must be < 1/4");
  if (m < 0) throw std::invalid_argument("angular_indices: m must be >= 0");
  SpectralIndices s;
  s.m = m;
  s.nu = static_cast<double>(m) * (m + n - 3);
  // roots of k^2 + k(n-3)/2 - nu/4 = 0
  const double half_b = 0.25 * (n - 3);
  const double disc = std::sqrt(half_b * half_b + 0.25 * s.nu);
  s.kappa_plus = -half_b + disc;
  s.kappa_minus = -half_b - disc;
  s.kappa_regular = m == 0 ? 0.0 : s.kappa_plus;
  // roots of g(g+n-2) = Lambda
  const double half_n = 0.5 * (n - 2);
  const double gdisc = std::sqrt(Lambda + half_n * half_n);
  if (!(Lambda + half_n * half_n >= 0))
    throw std::domain_error("angular_indices: Lambda below the radial spectrum vertex");
  s.gamma_plus = -half_n + gdisc;
  s.gamma_minus = -half_n - gdisc;
  return s;
}

RegimeClassification classify_regime(const ProblemParams& params) {
  params.validate();
  if (!params.p) throw std::invalid_argument("classify_regime: p required");
  const ExponentTable tab = derive_exponents(params);
  const double p = *params.p;
  RegimeClassification rc;
  const double gamma_star = -2.0 / (p - 1.0);
  rc.Lambda0 = tab.lambda(gamma_star) - tab.lambda(tab.alpha_plus);
  rc.Lambda0_minus = tab.lambda(gamma_star) - tab.lambda(tab.alpha_minus);

  if (std::abs(p - tab.p_c) <= kCriticalTol * std::max(1.0, tab.p_c)) {
    rc.plus_branch = PlusBranch::critical;
  } else if (p < tab.p_c) {
    rc.plus_branch = PlusBranch::exists_unique;
  } else {
    rc.plus_branch = PlusBranch::nonexistent;
  }

  const bool ko_finite = std::isfinite(tab.p_KO);
  if (ko_finite && std::abs(p - tab.p_KO) <= kCriticalTol * std::max(1.0, tab.p_KO)) {
    rc.minus_branch = MinusBranch::critical;
  } else if (p < tab.p_KO) {
    rc.minus_branch = MinusBranch::exists;
  } else {
    rc.minus_branch = MinusBranch::nonexistent_KO;
  }

  rc.strong_singularity_possible = p < tab.p_KO;

  // Minus-branch recipe row: 2 when Lambda0_minus <= 0 (only reachable for
  // mu > mu_star), otherwise 3 above mu_star and 4 at or below it.
  rc.table1_row = 0;
  if (rc.minus_branch == MinusBranch::exists) {
    if (rc.Lambda0_minus <= 0) {
      rc.table1_row = 2;
    } else {
      rc.table1_row = params.mu > tab.mu_star ? 3 : 4;
    }
  }

  switch (rc.plus_branch) {
    case PlusBranch::exists_unique:
      rc.applicable_theorems.push_back("separable_plus_exists_unique");
      break;
    case PlusBranch::nonexistent:
      rc.applicable_theorems.push_back("separable_plus_nonexistent");
      break;
    case PlusBranch::critical:
      rc.applicable_theorems.push_back("separable_plus_critical_undetermined");
      break;
  }
  switch (rc.minus_branch) {
    case MinusBranch::exists:
      rc.applicable_theorems.push_back("separable_minus_exists");
      break;
    case MinusBranch::nonexistent_KO:
      rc.applicable_theorems.push_back("separable_minus_nonexistent_KO");
      break;
    case MinusBranch::critical:
      rc.applicable_theorems.push_back("separable_minus_critical_undetermined");
      break;
  }
  return rc;
}

}  // namespace hsh
