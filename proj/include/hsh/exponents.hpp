#ifndef HSH_EXPONENTS_HPP
#define HSH_EXPONENTS_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hsh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Problem instance (n, mu, p). p is absent for linear-only work.
// Valid range: n >= 2, mu < 1/4 strictly, p > 1 strictly when present.
struct ProblemParams {
  int n;
  double mu;
  std::optional<double> p;

  void validate() const;  // throws std::invalid_argument / std::domain_error
};

// All closed-form derived quantities of an instance.
// alpha_pm are the roots of a(a-1) + mu = 0, i.e. a = 1/2 +- sqrt(1/4 - mu).
// Lambda(g) = g(g + n - 2). p_KO and p_c_minus are extended reals (+inf allowed).
struct ExponentTable {
  int n = 0;
  double mu = 0;
  double alpha_plus = 0;
  double alpha_minus = 0;
  double p_c = 0;
  double p_KO = kInf;
  double p_c_minus = kInf;
  double mu_star = 0;                  // -n(n-2)/4
  std::optional<double> C_pmu;         // strong-singularity constant, absent if radicand < 0

  double lambda(double gamma) const { return gamma * (gamma + n - 2); }
};

// Indices of the angular problem: azimuthal eigenvalue nu_m = m(m+n-3),
// indicial roots kappa at t=1 and radial exponents gamma for a given Lambda.
//
// kappa_pm are the roots of k^2 + k(n-3)/2 - nu_m/4 = 0 computed by the
// quadratic formula, kappa_regular being the exponent of the branch regular
// on the x1-axis (0 when m = 0, the positive root when m >= 1).  Note the
// additive constant in the closed form is -(n-3)/4, not -(n-3)/2; defining
// the roots through the quadratic keeps kappa_regular = 0 at nu = 0.
struct SpectralIndices {
  int m = 0;
  double nu = 0;
  double kappa_plus = 0;
  double kappa_minus = 0;
  double kappa_regular = 0;
  double gamma_plus = 0;
  double gamma_minus = 0;
};

enum class PlusBranch { exists_unique, nonexistent, critical };
enum class MinusBranch { exists, nonexistent_KO, critical };

const char* to_string(PlusBranch b);
const char* to_string(MinusBranch b);

// Which existence/nonexistence results apply at (n, mu, p) and which
// sub/supersolution recipe row (1..4) serves the minus branch (0 = none).
struct RegimeClassification {
  PlusBranch plus_branch;
  MinusBranch minus_branch;
  bool strong_singularity_possible;  // p < p_KO
  int table1_row;                    // minus-branch recipe row 2..4; 0 if p >= p_KO
  std::vector<std::string> applicable_theorems;
  double Lambda0;        // Lambda(-2/(p-1)) - Lambda(alpha_plus)
  double Lambda0_minus;  // Lambda(-2/(p-1)) - Lambda(alpha_minus)
};

// Closed-form derived quantities. Rejects mu >= 1/4 (std::domain_error).
ExponentTable derive_exponents(const ProblemParams& params);

// C_{p,mu} = {2(p+1)/(p-1)^2 + mu}^{1/(p-1)} when the radicand is >= 0,
// absent otherwise. Zero radicand (p = p_KO) gives exactly 0.
std::optional<double> critical_constant(const ProblemParams& params);

// Indicial data at t=1 and the two radial exponents solving
// gamma(gamma+n-2) = Lambda.
SpectralIndices angular_indices(int n, double mu, int m, double Lambda);

// Total classification per the strict inequalities; p within 1e-12 of a
// threshold is tagged critical rather than silently assigned to a side.
RegimeClassification classify_regime(const ProblemParams& params);

}  // namespace hsh

#endif
