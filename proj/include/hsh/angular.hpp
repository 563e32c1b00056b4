#ifndef HSH_ANGULAR_HPP
#define HSH_ANGULAR_HPP

#include <span>
#include <string>
#include <vector>

#include "hsh/frobenius.hpp"

namespace hsh {

namespace detail {

// Graded node sets on [lo, hi]. `cubic` clusters as u^3 at both ends (used for
// profile storage), `quadratic` as u^2 (used by the nonlinear solver).
enum class Grading { quadratic, cubic };
std::vector<double> graded_grid(double lo, double hi, int n_nodes, Grading g);

// Two-point quintic Hermite (value/derivative/second derivative data).
double hermite5(double t, double t0, double t1, double y0, double dy0, double ddy0,
                double y1, double dy1, double ddy1);
double hermite5_derivative(double t, double t0, double t1, double y0, double dy0,
                           double ddy0, double y1, double dy1, double ddy1);

}  // namespace detail

// value(t) = sum_i coeffs[i] * t^powers[i]
struct PowerModel {
  std::vector<double> powers;
  std::vector<double> coeffs;
  double value(double t) const;
  double derivative(double t) const;
};

// A function on (0,1) stored as graded-grid values of y(t) = k(t)/t^prefactor
// plus endpoint expansions, evaluable arbitrarily close to both endpoints.
struct AngularProfile {
  enum class Kind { linear, nonlinear };
  Kind kind = Kind::linear;

  int n = 0;
  double mu = 0;
  double nu = 0;         // linear
  double Lambda = 0;     // linear
  double p = 0;          // nonlinear
  double Lambda_star = 0;  // nonlinear: Lambda(-2/(p-1))

  double prefactor = 0;
  std::vector<double> grid, y, dy, ddy;

  double switch0 = 0.08;  // below: endpoint-0 representation
  double switch1 = 0.92;  // above: endpoint-1 representation (linear only)

  // t=0 side: linear profiles carry the fitted two-basis combination
  // A * t^{alpha_-} f1(t) + B * t^{alpha_+} f0(t); nonlinear ones a PowerModel.
  bool have_bases0 = false;
  frobenius::Expansion basis0_minus, basis0_plus;
  double A = 0, B = 0;
  PowerModel model0;

  // t=1 side (linear): C1 * selected-branch expansion in s = 1-t
  bool have_expansion1 = false;
  frobenius::Expansion expansion1;
  double C1 = 1.0;

  std::string normalization;

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;  // consistent with the stored equation

  LinearAngularODE ode() const;  // linear kinds only
};

// Adaptive interior propagation of the linear angular equation with dense
// recording. `record_at` must be sorted in the direction of travel.
struct IntegrationResult {
  double k = 0, kdot = 0;
  std::vector<double> ts, ks, kdots;
};
IntegrationResult integrate_interior(const LinearAngularODE& ode, double t_from, double t_to,
                                     double k0, double kdot0, double tol,
                                     std::span<const double> record_at = {});

// Profile of the singular separable harmonic factor k_gamma: regular branch at
// t=1 (unit leading coefficient), continued to t=0 where it carries fitted
// coefficients on both local bases. Requires Lambda(gamma) to stay away from
// the eigenvalues Lambda_{s,m} by gap_tol (relative); otherwise
// EigenvalueCollision is thrown.
AngularProfile solve_k_gamma(int n, double mu, int m, double gamma, double tol = 1e-12,
                             double gap_tol = 1e-6);

struct OriginFit {
  double A = 0, B = 0;
  double condition = 0;  // of the scaled collocation matrix
  double residual = 0;   // relative least-squares residual
  bool singular = false;  // |A| above the relative threshold
};

// Least-squares fit of the two endpoint-0 bases at collocation nodes inside
// the series radius. Throws IllConditionedFit when alpha_+ - alpha_- < 0.05.
OriginFit classify_origin_behavior(const AngularProfile& profile,
                                   double singular_threshold = 1e-6);

namespace detail {

// expansion truncated below the resonant step when the indicial roots differ
// by a reachable integer
frobenius::Expansion expand_or_truncate(const LinearAngularODE& ode, int endpoint,
                                        double exponent, int order);

// fill grid/y/dy/ddy of a linear profile from raw (t, k, k') samples
void fill_profile_storage(AngularProfile& prof, const std::vector<double>& ts,
                          const std::vector<double>& ks, const std::vector<double>& kdots);

OriginFit fit_origin(const AngularProfile& prof, const frobenius::Expansion& basis_minus,
                     const frobenius::Expansion& basis_plus, double singular_threshold);

}  // namespace detail

}  // namespace hsh

#endif
