#ifndef HSH_NONLINEAR_HPP
#define HSH_NONLINEAR_HPP

#include <functional>
#include <span>
#include <vector>

#include "hsh/angular.hpp"
#include "hsh/exponents.hpp"

namespace hsh::nonlinear {

enum class Branch { plus, minus };
const char* to_string(Branch b);

// Sub/supersolution pair for the angular equation
//   L v := (1-t^2) v'' - (n-1) t v' + (mu/t^2) v + Lambda(-2/(p-1)) v = v^p,
// built from the closed forms
//   row 1:  tau t^a            /  c t^a (1 - kappa t^eps),  a = alpha_+
//   row 2:  tau t^a (1-kappa t^eps)_+ / c t^a,              a = alpha_-
//   row 3,4: tau t^a (1-kappa t^eps)_+ / c t^a (1+kappa t^eps)
struct Bracket {
  Branch branch = Branch::plus;
  int row = 0;
  double tau = 0, c = 0, kappa = 0, epsilon = 0;
  int n = 0;
  double mu = 0, p = 0;
  double alpha = 0;         // alpha_+ (plus) or alpha_- (minus)
  double Lambda_star = 0;   // Lambda(-2/(p-1))
  double Lambda0 = 0;       // Lambda_star - Lambda(alpha)
  double Lambda_eps = 0;    // Lambda_star - Lambda(alpha + epsilon)

  double sub(double t) const;
  double super(double t) const;
  // closed-form L[.] - [.]^p; >= 0 certifies the subsolution, <= 0 the supersolution
  double sub_defect(double t) const;
  double super_defect(double t) const;
  // magnitude scales of the defect terms at t, for relative sign checks
  double sub_defect_scale(double t) const;
  double super_defect_scale(double t) const;
};

// Deterministic constant search per the table row: epsilon at the midpoint of
// its admissible interval, kappa per the row constraint (doubled until the
// subsolution bracket is positive), c doubled / tau halved until the grid
// certificates hold, re-verified at double resolution.
Bracket build_bracket(const ProblemParams& params, Branch branch);

struct SolveOptions {
  double tol = 1e-8;
  int nodes = 8001;           // grid nodes including both ends
  int max_iterations = 60000;
  double shift_margin = 1.25;
  double super_scale = 1.0;   // start iteration from super_scale * supersolution
};

struct NonlinearProfile {
  Branch branch = Branch::plus;
  AngularProfile profile;  // nonlinear kind; stores y = v / t^alpha
  double v_limit = 0;      // lim_{t->0} v(t)/t^alpha
  Bracket bracket;
  double residual_sup = 0;  // scaled residual on the interior grid
  int iterations = 0;
  double final_change = 0;
  double b_admixture = 0;  // fitted coefficient of the t^{alpha_+} admixture (minus branch)

  double value(double t) const { return profile.value(t); }
};

// Monotone iteration from the supersolution. Throws NoBracket when the
// branch precondition fails and MonotonicityViolation if the decrease of the
// iterates breaks even after one grid refinement.
NonlinearProfile solve_profile(const ProblemParams& params, Branch branch,
                               double tol = 1e-8);
NonlinearProfile solve_profile(const ProblemParams& params, Branch branch,
                               const SolveOptions& opts);

// Relative defect of the identity obtained by weighting the equation with
// t^{alpha_+}: Lambda0 I1 - I2 + A(alpha_+ - alpha_-) = 0, where the flux
// term A(alpha_+ - alpha_-) survives at t=0 exactly for minus-branch
// profiles (A = v_limit) and vanishes for plus-branch ones. Throws
// DivergentIntegral when an endpoint weight is not integrable.
double integral_identity_check(const NonlinearProfile& prof);
// same defect for an arbitrary angular candidate v(t) (testing hook);
// boundary_amplitude is lim v/t^{alpha_-} for minus-type candidates, 0 else
double integral_identity_defect(int n, double mu, double p,
                                const std::function<double(double)>& v,
                                double alpha_decay_at_0, double boundary_amplitude = 0.0);

struct UniquenessReport {
  int n_starts = 0;
  double max_pairwise_diff = 0;  // sup-norm distance between w = v/t^{alpha_+} limits
  double tol = 0;
  bool agree = false;
  bool w0_all_positive = false;
  std::vector<double> w0_values;
  std::vector<std::string> start_labels;
  unsigned seed = 0;
};

// Multi-start consistency check of the plus-branch solution: monotone runs
// from scaled supersolutions plus damped-Newton collocation runs from random
// bracket-interior starts. Disagreement is reported, never asserted away.
UniquenessReport check_uniqueness_plus(const ProblemParams& params, int n_starts,
                                       double tol, unsigned seed = 12345);

// u(x) = |x|^{-2/(p-1)} v(x1/|x|) on the half-space x1 > 0.
double eval_solution(const NonlinearProfile& prof, std::span<const double> x);

}  // namespace hsh::nonlinear

#endif
