#ifndef HSH_VERIFY_HPP
#define HSH_VERIFY_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hsh::verify {

// Uniform interface over harmonics, nonlinear solutions and closed forms:
// an evaluator on the half-space plus the claimed metadata.
struct FieldSampler {
  std::function<double(std::span<const double>)> eval;
  int n = 0;
  double mu = 0;
  double p = 0;  // consulted only by nonlinear checks
  double claimed_radial_exponent = 0;
  double claimed_boundary_exponent = 0;
  std::string branch;
};

struct BoundReport {
  double constant_found = 0;
  std::string grid_spec;
  std::vector<double> worst_point;
  double sup_product = 0;
  bool pass = false;
};

// Central-difference residual of the equation at x, normalized by the local
// scale |u(x)|/x1^2. order 4 (default) uses the five-point stencil per axis;
// order 2 the classical three-point one. Throws StencilOutOfDomain when the
// stencil leaves the half-space.
double pde_residual(const FieldSampler& u, std::span<const double> x, double h,
                    bool nonlinearity, int order = 4);

// Smallest power-of-two c making U = c (x1-eps)^{-2/(p-1)} (R-r)^{-2/(p-1)}
// a supersolution on {x1 > eps} intersected with the ball of radius R,
// certified on a 10^4-point (x1, r) grid and spot-checked by pde_residual.
double ko_supersolution_constant(int n, double mu, double p, double R, double epsilon);

// u(x) x1^{2/(p-1)} <= C on the half ball of radius R/2, C from the
// supersolution construction.
BoundReport ko_bound_check(const FieldSampler& u, int n, double mu, double p, double R);

struct PLVerdict {
  bool hypothesis_a = false;   // h/x1^{alpha_+} bounded on rho < |x| < R
  bool hypothesis_b = false;   // h/(x1^{alpha_-}+x1^{alpha_+}|x|^{-(n-2+2a+)}) -> 0
  bool hypotheses_hold = false;
  bool conclusion_holds = false;  // h/x1^{alpha_+} bounded on the whole half ball
  bool inconclusive = false;      // non-monotone trends in the x1 -> 0 samples
  double limit_a = 0, limit_b = 0, limit_conclusion = 0;  // extrapolated
  double slope_a = 0, slope_b = 0, slope_conclusion = 0;  // log-log trends
};

// Grid realization of the comparison dichotomy: trends are estimated from the
// geometric sequence x1 in {1e-2, 1e-3, 1e-4}. A corroboration harness, not a
// proof; thresholds are documented in the implementation.
PLVerdict phragmen_lindelof_check(const FieldSampler& h, double R, double rho,
                                  int grid = 24);

// max over the points of |scaled residual of u_a at y - scaled residual of u
// at a y| with u_a(x) = a^{2/(p-1)} u(a x).
double scaling_check(const FieldSampler& u, double p, double a,
                     std::span<const std::vector<double>> points);

}  // namespace hsh::verify

#endif
