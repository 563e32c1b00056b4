#include "hsh/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "hsh/errors.hpp"

namespace hsh::verify {

namespace {

constexpr int kMaxDoublings = 60;

double laplacian_fd(const FieldSampler& u, std::span<const double> x, double h, int order) {
  std::vector<double> xp(x.begin(), x.end());
  const double uc = u.eval(x);
  double acc = 0;
  for (int i = 0; i < u.n; ++i) {
    if (order == 2) {
      xp[i] = x[i] + h;
      const double up = u.eval(xp);
      xp[i] = x[i] - h;
      const double um = u.eval(xp);
      xp[i] = x[i];
      acc += up - 2.0 * uc + um;
    } else {
      double s = -2.5 * uc;
      const double w[2] = {4.0 / 3.0, -1.0 / 12.0};
      for (int k = 1; k <= 2; ++k) {
        xp[i] = x[i] + k * h;
        const double up = u.eval(xp);
        xp[i] = x[i] - k * h;
        const double um = u.eval(xp);
        xp[i] = x[i];
        s += w[k - 1] * (up + um);
      }
      acc += s;
    }
  }
  return acc / (h * h);
}

double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

struct Trend {
  double slope = 0;   // ratio ~ x1^slope
  double limit = 0;   // Aitken-extrapolated value
  bool monotone = true;
};

// trend of positive samples r_k taken at the geometric sequence x1_k
Trend trend_from(const std::vector<double>& x1s, const std::vector<double>& rs) {
  Trend t;
  const size_t n = rs.size();
  t.slope = std::log(rs[n - 1] / rs[n - 2]) / std::log(x1s[n - 1] / x1s[n - 2]);
  const double d1 = rs[1] - rs[0], d2 = rs[2] - rs[1];
  t.monotone = d1 == 0.0 || d2 == 0.0 || (d1 > 0) == (d2 > 0) ||
               std::abs(d2) < 1e-12 * std::abs(rs[0]);
  const double den = d1 - d2;
  t.limit = std::abs(den) > 1e-300 ? rs[2] - d2 * d2 / den : rs[2];
  return t;
}

}  // namespace

double pde_residual(const FieldSampler& u, std::span<const double> x, double h,
                    bool nonlinearity, int order) {
  if (x.size() != static_cast<size_t>(u.n))
    throw std::invalid_argument("pde_residual: point dimension mismatch");
  if (!(h > 0)) throw std::invalid_argument("pde_residual: h must be positive");
  if (order != 2 && order != 4)
    throw std::invalid_argument("pde_residual: order must be 2 or 4");
  const int reach = order == 2 ? 1 : 2;
  if (!(x[0] - reach * h > 0))
    throw StencilOutOfDomain("pde_residual: stencil leaves the half-space at x1=" +
                             std::to_string(x[0]));
  const double uc = u.eval(x);
  double res = -laplacian_fd(u, x, h, order) - u.mu / (x[0] * x[0]) * uc;
  if (nonlinearity) res += std::pow(uc, u.p);
  const double scale = std::abs(uc) / (x[0] * x[0]) + 1e-300;
  return res / scale;
}

double ko_supersolution_constant(int n, double mu, double p, double R, double epsilon) {
  if (!(R > 0)) throw std::invalid_argument("ko_supersolution_constant: R must be positive");
  if (!(epsilon > 0 && epsilon < 0.5 * R))
    throw std::invalid_argument("ko_supersolution_constant: need 0 < eps < R/2");
  if (!(p > 1)) throw std::invalid_argument("ko_supersolution_constant: p must be > 1");

  const double a = 2.0 / (p - 1.0);
  const double Ap = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
  const double Bp = 2.0 * (n - 1.0) / (p - 1.0);
  const double Cp = 2.0 * a * a;

  auto bracket = [&](double x1, double r, double c) {
    const double d = x1 - epsilon;
    const double s = R - r;
    return d * d * (Ap + Bp * s / r) - Cp * d * s * x1 / r + Ap * s * s +
           mu / (x1 * x1) * d * d * s * s - std::pow(c, p - 1.0);
  };

  constexpr int kSide = 100;  // 10^4 grid points
  double c = 1.0;
  for (int doubling = 0; doubling < kMaxDoublings; ++doubling) {
    bool ok = true;
    for (int i = 0; i < kSide && ok; ++i) {
      const double ui = (i + 0.5) / kSide;
      const double x1 = epsilon + (R - epsilon) * ui * ui;  // graded toward x1 = eps
      for (int j = 0; j < kSide; ++j) {
        const double vj = (j + 0.5) / kSide;
        const double r = x1 + (R - x1) * vj;
        if (bracket(x1, r, c) > 0) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      // spot check the sign of the full residual of U
      FieldSampler U;
      U.n = n;
      U.mu = mu;
      U.p = p;
      const double cc = c;
      U.eval = [=](std::span<const double> x) {
        double r = norm2(x);
        return cc * std::pow(x[0] - epsilon, -a) * std::pow(R - r, -a);
      };
      bool super_ok = true;
      for (double f : {0.3, 0.5, 0.7}) {
        std::vector<double> x(n, 0.0);
        x[0] = epsilon + f * (0.6 * R - epsilon);
        if (n > 1) x[1] = 0.2 * R;
        const double hstep = 1e-4 * (x[0] - epsilon);
        if (pde_residual(U, x, hstep, true) < -1e-6) {
          super_ok = false;
          break;
        }
      }
      if (super_ok) return c;
    }
    c *= 2.0;
  }
  throw SearchExhausted("ko_supersolution_constant: no admissible c found");
}

BoundReport ko_bound_check(const FieldSampler& u, int n, double mu, double p, double R) {
  const double a = 2.0 / (p - 1.0);
  const double eps = 1e-3 * R;
  const double c = ko_supersolution_constant(n, mu, p, R, eps);
  BoundReport rep;
  rep.constant_found = c * std::pow(0.5 * R, -a);
  rep.grid_spec = "60 log radii in [1e-3 R, R/2] x 60 angular values, t in [1e-3, 1-1e-3]";

  constexpr int kNr = 60, kNt = 60;
  double sup = 0;
  std::vector<double> worst(n, 0.0);
  for (int i = 0; i < kNr; ++i) {
    const double r = 1e-3 * R * std::pow(500.0, static_cast<double>(i) / (kNr - 1));
    for (int j = 0; j < kNt; ++j) {
      const double t = 1e-3 + (1.0 - 2e-3) * j / (kNt - 1.0);
      std::vector<double> x(n, 0.0);
      x[0] = r * t;
      if (n > 1) x[1] = r * std::sqrt(1.0 - t * t);
      const double prod = u.eval(x) * std::pow(x[0], a);
      if (prod > sup) {
        sup = prod;
        worst = x;
      }
    }
  }
  rep.sup_product = sup;
  rep.worst_point = worst;
  rep.pass = sup <= rep.constant_found;
  return rep;
}

PLVerdict phragmen_lindelof_check(const FieldSampler& h, double R, double rho, int grid) {
  if (!(rho > 0 && rho < R)) throw std::invalid_argument("phragmen_lindelof_check: 0<rho<R");
  const double disc = std::sqrt(0.25 - h.mu);
  const double alpha_plus = 0.5 + disc;
  const double alpha_minus = 0.5 - disc;
  const std::vector<double> x1s = {1e-2, 1e-3, 1e-4};

  auto eval_at = [&](double x1, double radius) {
    std::vector<double> x(h.n, 0.0);
    x[0] = x1;
    x[1] = std::sqrt(radius * radius - x1 * x1);
    return h.eval(x);
  };

  auto max_ratio = [&](double x1, double r_lo, double r_hi,
                       const std::function<double(double, double)>& envelope) {
    double worst = 0;
    for (int i = 0; i < grid; ++i) {
      const double radius = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (grid - 1));
      if (radius <= x1 * 1.0000001) continue;
      worst = std::max(worst, std::abs(eval_at(x1, radius)) / envelope(x1, radius));
    }
    return worst + 1e-300;
  };

  auto env_a = [&](double x1, double) { return std::pow(x1, alpha_plus); };
  auto env_b = [&](double x1, double radius) {
    return std::pow(x1, alpha_minus) +
           std::pow(x1, alpha_plus) * std::pow(radius, -(h.n - 2 + 2.0 * alpha_plus));
  };

  std::vector<double> ra, rb, rc;
  for (double x1 : x1s) {
    ra.push_back(max_ratio(x1, rho, R, env_a));
    rb.push_back(max_ratio(x1, 1e-3 * R, R, env_b));
    rc.push_back(max_ratio(x1, 1e-3 * R, R, env_a));
  }

  const Trend ta = trend_from(x1s, ra);
  const Trend tb = trend_from(x1s, rb);
  const Trend tc = trend_from(x1s, rc);

  PLVerdict v;
  v.slope_a = ta.slope;
  v.slope_b = tb.slope;
  v.slope_conclusion = tc.slope;
  v.limit_a = ta.limit;
  v.limit_b = tb.limit;
  v.limit_conclusion = tc.limit;
  // ratio ~ x1^slope as x1 -> 0: slope >= 0 (within noise) means bounded,
  // slope > 0.05 means a vanishing limit
  v.hypothesis_a = ta.slope > -0.02;
  v.hypothesis_b = tb.slope > 0.05;
  v.hypotheses_hold = v.hypothesis_a && v.hypothesis_b;
  v.conclusion_holds = tc.slope > -0.02;
  v.inconclusive = !ta.monotone || !tb.monotone || !tc.monotone;
  return v;
}

double scaling_check(const FieldSampler& u, double p, double a,
                     std::span<const std::vector<double>> points) {
  if (!(a > 0)) throw std::invalid_argument("scaling_check: a must be positive");
  FieldSampler ua = u;
  const auto base_eval = u.eval;
  ua.eval = [=](std::span<const double> x) {
    std::vector<double> xs(x.begin(), x.end());
    for (double& v : xs) v *= a;
    return std::pow(a, 2.0 / (p - 1.0)) * base_eval(xs);
  };

  double drift = 0;
  for (const auto& y : points) {
    const double h1 = 1e-3 * std::min(y[0], 1.0);
    std::vector<double> ay(y.begin(), y.end());
    for (double& v : ay) v *= a;
    const double h2 = 1e-3 * std::min(ay[0], 1.0);
    const double r1 = pde_residual(ua, y, h1, true);
    const double r2 = pde_residual(u, ay, h2, true);
    drift = std::max(drift, std::abs(r1 - r2));
  }
  return drift;
}

}  // namespace hsh::verify
