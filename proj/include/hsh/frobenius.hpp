#ifndef HSH_FROBENIUS_HPP
#define HSH_FROBENIUS_HPP

#include <vector>

namespace hsh {

// The linear angular equation on (0,1):
//   (1-t^2) k'' - (n-1) t k' + (mu/t^2) k + (Lambda - nu/(1-t^2)) k = 0.
// Regular singular points at t = 0 and t = 1.
struct LinearAngularODE {
  int n;
  double mu;
  double nu;
  double Lambda;

  // k'' from (k, k') at an interior point.
  double second_derivative(double t, double k, double kdot) const;
  // residual of (k, k', k'') in the equation above
  double residual(double t, double k, double kdot, double kddot) const;
};

namespace frobenius {

// Truncated Frobenius solution about one endpoint. The local coordinate is
// z = t at endpoint 0 and z = 1-t at endpoint 1; value(z) = z^exponent * sum_j coeffs[j] z^j.
struct Expansion {
  int endpoint = 0;
  double exponent = 0;
  std::vector<double> coeffs;  // coeffs[0] = 1
  double radius = 0;

  double series(double z) const;             // sum coeffs[j] z^j
  double series_derivative(double z) const;  // d/dz of series
  double series_second_derivative(double z) const;
  double value(double z) const;
  double derivative(double z) const;         // d/dz of value
  double second_derivative(double z) const;  // d^2/dz^2 of value
};

// Recurrence-generated expansion with unit leading coefficient.
// `exponent` must be an indicial root at that endpoint; `order` is the number
// of correction terms generated (coeffs.size() == order+1).
// Throws ResonantIndices if the recurrence divides by (numerically) zero,
// which happens when the indicial roots differ by an integer reachable
// within `order` steps.
Expansion expand(const LinearAngularODE& ode, int endpoint, double exponent, int order);

// The two indicial roots at an endpoint, larger first.
// endpoint 0: roots of a(a-1) + mu = 0; endpoint 1: of k^2 + k(n-3)/2 - nu/4 = 0.
void indicial_roots(const LinearAngularODE& ode, int endpoint, double& larger, double& smaller);

}  // namespace frobenius
}  // namespace hsh

#endif
