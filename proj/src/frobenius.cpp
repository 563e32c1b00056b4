#include "hsh/frobenius.hpp"

#include <cmath>
#include <stdexcept>

#include "hsh/errors.hpp"

namespace hsh {

double LinearAngularODE::second_derivative(double t, double k, double kdot) const {
  const double one_m_t2 = (1.0 - t) * (1.0 + t);
  return ((n - 1) * t * kdot - (mu / (t * t) + Lambda - nu / one_m_t2) * k) / one_m_t2;
}

double LinearAngularODE::residual(double t, double k, double kdot, double kddot) const {
  const double one_m_t2 = (1.0 - t) * (1.0 + t);
  return one_m_t2 * kddot - (n - 1) * t * kdot + (mu / (t * t) + Lambda - nu / one_m_t2) * k;
}

namespace frobenius {

namespace {

using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Poly scale(Poly a, double s) {
  for (double& v : a) v *= s;
  return a;
}

// Fuchsian-normalized coefficients about z = 0:
//   z^2 A(z) k'' + z B(z) k' + C(z) k = 0,  A(0) != 0.
struct Normalized {
  Poly A, B, C;
};

// Multiply the equation by t^2 (1-t^2); local coordinate z = t.
Normalized normalize_at_0(const LinearAngularODE& ode) {
  const double n = ode.n;
  Normalized f;
  const Poly one_m_z2 = {1.0, 0.0, -1.0};
  f.A = mul(one_m_z2, one_m_z2);                        // (1-z^2)^2
  f.B = scale(mul({0.0, 0.0, 1.0}, one_m_z2), -(n - 1));  // -(n-1) z^2 (1-z^2)
  f.C = add(add(scale(one_m_z2, ode.mu),
                scale(mul({0.0, 0.0, 1.0}, one_m_z2), ode.Lambda)),
            {0.0, 0.0, -ode.nu});
  return f;
}

// Substitute t = 1-z and multiply by z (2-z) (1-z)^2; local coordinate z = 1-t.
Normalized normalize_at_1(const LinearAngularODE& ode) {
  const double n = ode.n;
  Normalized f;
  const Poly two_m_z = {2.0, -1.0};
  const Poly one_m_z = {1.0, -1.0};
  const Poly one_m_z2 = mul(one_m_z, one_m_z);
  f.A = mul(mul(two_m_z, two_m_z), one_m_z2);              // (2-z)^2 (1-z)^2
  f.B = scale(mul(two_m_z, mul(one_m_z, one_m_z2)), n - 1);  // (n-1)(2-z)(1-z)^3
  f.C = add(add(scale(mul({0.0, 1.0}, two_m_z), ode.mu),
                scale(mul(mul({0.0, 1.0}, two_m_z), one_m_z2), ode.Lambda)),
            scale(one_m_z2, -ode.nu));
  return f;
}

double indicial_poly(const Normalized& f, double beta) {
  return f.A[0] * beta * (beta - 1.0) + f.B[0] * beta + f.C[0];
}

}  // namespace

double Expansion::series(double z) const {
  double acc = 0.0;
  for (size_t j = coeffs.size(); j-- > 0;) acc = acc * z + coeffs[j];
  return acc;
}

double Expansion::series_derivative(double z) const {
  double acc = 0.0;
  for (size_t j = coeffs.size(); j-- > 1;) acc = acc * z + j * coeffs[j];
  return acc;
}

double Expansion::series_second_derivative(double z) const {
  double acc = 0.0;
  for (size_t j = coeffs.size(); j-- > 2;) acc = acc * z + j * (j - 1) * coeffs[j];
  return acc;
}

double Expansion::value(double z) const { return std::pow(z, exponent) * series(z); }

double Expansion::derivative(double z) const {
  return std::pow(z, exponent - 1.0) * (exponent * series(z) + z * series_derivative(z));
}

double Expansion::second_derivative(double z) const {
  return std::pow(z, exponent - 2.0) *
         (exponent * (exponent - 1.0) * series(z) +
          2.0 * exponent * z * series_derivative(z) +
          z * z * series_second_derivative(z));
}

void indicial_roots(const LinearAngularODE& ode, int endpoint, double& larger, double& smaller) {
  if (endpoint == 0) {
    const double d = std::sqrt(0.25 - ode.mu);
    larger = 0.5 + d;
    smaller = 0.5 - d;
  } else {
    const double hb = 0.25 * (ode.n - 3);
    const double d = std::sqrt(hb * hb + 0.25 * ode.nu);
    larger = -hb + d;
    smaller = -hb - d;
  }
}

Expansion expand(const LinearAngularODE& ode, int endpoint, double exponent, int order) {
  if (order < 2) throw std::invalid_argument("frobenius::expand: order must be >= 2");
  if (endpoint != 0 && endpoint != 1)
    throw std::invalid_argument("frobenius::expand: endpoint must be 0 or 1");
  const Normalized f = endpoint == 0 ? normalize_at_0(ode) : normalize_at_1(ode);

  const double ind = indicial_poly(f, exponent);
  const double ind_scale =
      std::abs(f.A[0]) * (std::abs(exponent) + 1.0) * (std::abs(exponent) + 1.0) +
      std::abs(f.B[0]) * (std::abs(exponent) + 1.0) + std::abs(f.C[0]) + 1.0;
  if (std::abs(ind) > 1e-8 * ind_scale)
    throw std::invalid_argument("frobenius::expand: exponent is not an indicial root");

  Expansion e;
  e.endpoint = endpoint;
  e.exponent = exponent;
  e.coeffs.assign(order + 1, 0.0);
  e.coeffs[0] = 1.0;

  const size_t degmax = f.A.size() - 1;  // A has the largest degree here
  double coeff_scale = 1.0;
  for (int j = 1; j <= order; ++j) {
    double rhs = 0.0;
    for (size_t i = 1; i <= std::min<size_t>(j, degmax); ++i) {
      const double beta = exponent + j - static_cast<double>(i);
      double coef = 0.0;
      if (i < f.A.size()) coef += f.A[i] * beta * (beta - 1.0);
      if (i < f.B.size()) coef += f.B[i] * beta;
      if (i < f.C.size()) coef += f.C[i];
      rhs -= coef * e.coeffs[j - i];
    }
    const double den = indicial_poly(f, exponent + j);
    const double bj = std::abs(exponent) + j + 1.0;
    const double den_scale =
        std::abs(f.A[0]) * bj * bj + std::abs(f.B[0]) * bj + std::abs(f.C[0]) + 1.0;
    if (std::abs(den) < 1e-9 * den_scale) {
      // 0/0 steps are log-free: the canonical branch takes a zero coefficient.
      // A genuinely nonzero right-hand side marks the logarithmic case.
      if (std::abs(rhs) <= 1e-8 * coeff_scale * den_scale) {
        e.coeffs[j] = 0.0;
        continue;
      }
      throw ResonantIndices(exponent, j,
                            "frobenius::expand: resonant indicial roots (integer separation)");
    }
    e.coeffs[j] = rhs / den;
    coeff_scale = std::max(coeff_scale, std::abs(e.coeffs[j]));
  }

  // Conservative validity radius from the tail of the computed coefficients.
  double cmax = 0.0;
  for (double c : e.coeffs) cmax = std::max(cmax, std::abs(c));
  e.radius = 0.05;
  for (double r : {0.5, 0.4, 0.3, 0.2, 0.1}) {
    const double tail = std::abs(e.coeffs[order]) * std::pow(r, order) +
                        std::abs(e.coeffs[order - 1]) * std::pow(r, order - 1);
    if (tail <= 1e-13 * std::max(1.0, cmax)) {
      e.radius = r;
      break;
    }
  }
  return e;
}

}  // namespace frobenius
}  // namespace hsh
