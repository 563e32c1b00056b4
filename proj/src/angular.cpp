#include "hsh/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Dense>

#include "hsh/errors.hpp"
#include "hsh/exponents.hpp"
#include "hsh/spectra.hpp"

namespace hsh {

namespace detail {

std::vector<double> graded_grid(double lo, double hi, int n_nodes, Grading g) {
  if (n_nodes < 2) throw std::invalid_argument("graded_grid: need at least 2 nodes");
  std::vector<double> t(n_nodes);
  const double span = hi - lo;
  for (int j = 0; j < n_nodes; ++j) {
    const double u = static_cast<double>(j) / (n_nodes - 1);
    double m;
    if (g == Grading::quadratic) {
      m = u * u * (3.0 - 2.0 * u);
    } else {
      m = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    }
    t[j] = lo + span * m;
  }
  t.front() = lo;
  t.back() = hi;
  return t;
}

namespace {
struct Hermite5Coeffs {
  double a, b, c;
};
Hermite5Coeffs hermite5_tail(double h, double y0, double dy0, double ddy0, double y1,
                             double dy1, double ddy1) {
  const double A1 = y1 - y0 - h * dy0 - 0.5 * h * h * ddy0;
  const double A2 = h * (dy1 - dy0) - h * h * ddy0;
  const double A3 = h * h * (ddy1 - ddy0);
  Hermite5Coeffs q;
  q.c = 0.5 * (A3 - 6.0 * A2 + 12.0 * A1);
  q.b = A2 - 3.0 * A1 - 2.0 * q.c;
  q.a = A1 - q.b - q.c;
  return q;
}
}  // namespace

double hermite5(double t, double t0, double t1, double y0, double dy0, double ddy0,
                double y1, double dy1, double ddy1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const auto q = hermite5_tail(h, y0, dy0, ddy0, y1, dy1, ddy1);
  return y0 + h * dy0 * s + 0.5 * h * h * ddy0 * s * s +
         s * s * s * (q.a + s * (q.b + s * q.c));
}

double hermite5_derivative(double t, double t0, double t1, double y0, double dy0,
                           double ddy0, double y1, double dy1, double ddy1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const auto q = hermite5_tail(h, y0, dy0, ddy0, y1, dy1, ddy1);
  return dy0 + h * ddy0 * s +
         s * s * (3.0 * q.a + s * (4.0 * q.b + s * 5.0 * q.c)) / h;
}

}  // namespace detail

double PowerModel::value(double t) const {
  double acc = 0.0;
  for (size_t i = 0; i < powers.size(); ++i) acc += coeffs[i] * std::pow(t, powers[i]);
  return acc;
}

double PowerModel::derivative(double t) const {
  double acc = 0.0;
  for (size_t i = 0; i < powers.size(); ++i)
    acc += coeffs[i] * powers[i] * std::pow(t, powers[i] - 1.0);
  return acc;
}

LinearAngularODE AngularProfile::ode() const {
  if (kind != Kind::linear)
    throw std::logic_error("AngularProfile::ode: profile is not linear");
  return LinearAngularODE{n, mu, nu, Lambda};
}

namespace {

// locate interval index i with grid[i] <= t <= grid[i+1]
size_t locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  size_t i = it == grid.begin() ? 0 : static_cast<size_t>(it - grid.begin() - 1);
  if (i >= grid.size() - 1) i = grid.size() - 2;
  return i;
}

}  // namespace

double AngularProfile::value(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("AngularProfile::value: t outside [0,1]");
  if (t < switch0) {
    if (kind == Kind::linear && have_bases0)
      return A * basis0_minus.value(t) + B * basis0_plus.value(t);
    return model0.value(t);
  }
  if (t > switch1 && have_expansion1) return C1 * expansion1.value(1.0 - t);
  const double tc = std::clamp(t, grid.front(), grid.back());
  const size_t i = locate(grid, tc);
  const double yv = detail::hermite5(tc, grid[i], grid[i + 1], y[i], dy[i], ddy[i],
                                     y[i + 1], dy[i + 1], ddy[i + 1]);
  return std::pow(tc, prefactor) * yv;
}

double AngularProfile::derivative(double t) const {
  if (!(t > 0.0 && t <= 1.0))
    throw std::domain_error("AngularProfile::derivative: t outside (0,1]");
  if (t < switch0) {
    if (kind == Kind::linear && have_bases0)
      return A * basis0_minus.derivative(t) + B * basis0_plus.derivative(t);
    return model0.derivative(t);
  }
  if (t > switch1 && have_expansion1) return -C1 * expansion1.derivative(1.0 - t);
  const double tc = std::clamp(t, grid.front(), grid.back());
  const size_t i = locate(grid, tc);
  const double yv = detail::hermite5(tc, grid[i], grid[i + 1], y[i], dy[i], ddy[i],
                                     y[i + 1], dy[i + 1], ddy[i + 1]);
  const double yd = detail::hermite5_derivative(tc, grid[i], grid[i + 1], y[i], dy[i],
                                                ddy[i], y[i + 1], dy[i + 1], ddy[i + 1]);
  return std::pow(tc, prefactor) * (yd + prefactor * yv / tc);
}

double AngularProfile::second_derivative(double t) const {
  const double v = value(t);
  const double d = derivative(t);
  const double one_m_t2 = (1.0 - t) * (1.0 + t);
  if (kind == Kind::linear) return ode().second_derivative(t, v, d);
  return ((n - 1) * t * d - (mu / (t * t) + Lambda_star) * v + std::pow(v, p)) / one_m_t2;
}

IntegrationResult integrate_interior(const LinearAngularODE& ode, double t_from, double t_to,
                                     double k0, double kdot0, double tol,
                                     std::span<const double> record_at) {
  namespace odeint = boost::numeric::odeint;
  using state_t = std::array<double, 2>;

  if (!(tol > 0)) throw std::invalid_argument("integrate_interior: tol must be positive");
  if (!(t_from > 0 && t_from < 1 && t_to > 0 && t_to < 1))
    throw std::invalid_argument("integrate_interior: interval must lie inside (0,1)");

  IntegrationResult out;
  if (t_from == t_to) {
    out.k = k0;
    out.kdot = kdot0;
    return out;
  }

  auto system = [&ode](const state_t& x, state_t& dxdt, double t) {
    dxdt[0] = x[1];
    dxdt[1] = ode.second_derivative(t, x[0], x[1]);
  };

  const double dir = t_to > t_from ? 1.0 : -1.0;
  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<state_t>());
  state_t x{k0, kdot0};
  stepper.initialize(x, t_from, dir * 1e-4);

  size_t ri = 0;
  const size_t nrec = record_at.size();
  int tiny_steps = 0;
  while ((t_to - stepper.current_time()) * dir > 0) {
    const auto interval = stepper.do_step(system);
    const double t0 = interval.first, t1 = interval.second;
    if (std::abs(t1 - t0) < 1e-14 * std::max(1.0, std::abs(t1))) {
      if (++tiny_steps > 25)
        throw StepSizeUnderflow("integrate_interior: step size underflow near t=" +
                                std::to_string(t1));
    } else {
      tiny_steps = 0;
    }
    while (ri < nrec && (record_at[ri] - t0) * dir >= 0 && (t1 - record_at[ri]) * dir >= 0) {
      state_t xi;
      stepper.calc_state(record_at[ri], xi);
      out.ts.push_back(record_at[ri]);
      out.ks.push_back(xi[0]);
      out.kdots.push_back(xi[1]);
      ++ri;
    }
  }
  state_t xf;
  stepper.calc_state(t_to, xf);
  while (ri < nrec && (t_to - record_at[ri]) * dir >= 0) {
    state_t xi;
    stepper.calc_state(record_at[ri], xi);
    out.ts.push_back(record_at[ri]);
    out.ks.push_back(xi[0]);
    out.kdots.push_back(xi[1]);
    ++ri;
  }
  out.k = xf[0];
  out.kdot = xf[1];
  return out;
}

namespace detail {

frobenius::Expansion expand_or_truncate(const LinearAngularODE& ode, int endpoint,
                                        double exponent, int order) {
  try {
    return frobenius::expand(ode, endpoint, exponent, order);
  } catch (const ResonantIndices& r) {
    if (r.step >= 3) return frobenius::expand(ode, endpoint, exponent, r.step - 1);
    frobenius::Expansion e;
    e.endpoint = endpoint;
    e.exponent = exponent;
    e.coeffs = {1.0};
    e.radius = 0.05;
    return e;
  }
}

void fill_profile_storage(AngularProfile& prof, const std::vector<double>& ts,
                          const std::vector<double>& ks, const std::vector<double>& kdots) {
  const LinearAngularODE ode = prof.ode();
  const double e = prof.prefactor;
  const size_t n = ts.size();
  prof.grid = ts;
  prof.y.resize(n);
  prof.dy.resize(n);
  prof.ddy.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = ts[i];
    const double k = ks[i];
    const double kd = kdots[i];
    const double kdd = ode.second_derivative(t, k, kd);
    const double te = std::pow(t, -e);
    prof.y[i] = te * k;
    prof.dy[i] = te * (kd - e * k / t);
    prof.ddy[i] = te * (kdd - 2.0 * e * kd / t + e * (e + 1.0) * k / (t * t));
  }
}

// collocation nodes (indices into prof.grid) log-spread over [lo, cap]
std::vector<size_t> fit_nodes(const std::vector<double>& grid, double cap) {
  const double lo = grid.front();
  std::vector<size_t> idx;
  for (double f : {1.0, 1.7, 3.0, 5.5, 10.0, 17.0, 30.0, 50.0}) {
    const double target = std::min(lo * f, cap);
    auto it = std::lower_bound(grid.begin(), grid.end(), target);
    if (it == grid.end()) --it;
    const size_t i = static_cast<size_t>(it - grid.begin());
    if (idx.empty() || idx.back() != i) idx.push_back(i);
  }
  return idx;
}

OriginFit fit_origin(const AngularProfile& prof, const frobenius::Expansion& bm,
                     const frobenius::Expansion& bp, double singular_threshold) {
  const double cap = std::min(0.03, 0.8 * std::min(bm.radius, bp.radius));
  const auto nodes = fit_nodes(prof.grid, std::max(cap, 2.0 * prof.grid.front()));
  const size_t rows = 2 * nodes.size();
  Eigen::MatrixXd M(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (size_t j = 0; j < nodes.size(); ++j) {
    const size_t i = nodes[j];
    const double t = prof.grid[i];
    const double te = std::pow(t, prof.prefactor);
    const double k = te * prof.y[i];
    const double kd = te * (prof.dy[i] + prof.prefactor * prof.y[i] / t);
    const double w_val = 1.0 / (std::abs(k) + 1e-300);
    const double w_der = 1.0 / (std::abs(kd) + std::abs(k) / t + 1e-300);
    M(2 * j, 0) = w_val * bm.value(t);
    M(2 * j, 1) = w_val * bp.value(t);
    rhs(2 * j) = w_val * k;
    M(2 * j + 1, 0) = w_der * bm.derivative(t);
    M(2 * j + 1, 1) = w_der * bp.derivative(t);
    rhs(2 * j + 1) = w_der * kd;
  }
  const double s0 = M.col(0).cwiseAbs().maxCoeff() + 1e-300;
  const double s1 = M.col(1).cwiseAbs().maxCoeff() + 1e-300;
  M.col(0) /= s0;
  M.col(1) /= s1;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector2d sol = svd.solve(rhs);
  OriginFit fit;
  fit.A = sol(0) / s0;
  fit.B = sol(1) / s1;
  fit.condition = svd.singularValues()(0) / std::max(svd.singularValues()(1), 1e-300);
  fit.residual = (M * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
  fit.singular = std::abs(fit.A) > singular_threshold * (std::abs(fit.A) + std::abs(fit.B));
  return fit;
}

}  // namespace detail

namespace {

constexpr double kHandoff0 = 1e-3;
constexpr double kHandoff1 = 1e-3;
constexpr int kProfileNodes = 2000;
constexpr int kSeriesOrder = 14;

}  // namespace

AngularProfile solve_k_gamma(int n, double mu, int m, double gamma, double tol,
                             double gap_tol) {
  if (n < 2) throw std::invalid_argument("solve_k_gamma: n must be >= 2");
  if (!(mu < 0.25)) throw std::domain_error("solve_k_gamma: mu must be < 1/4");
  if (m < 0) throw std::invalid_argument("solve_k_gamma: m must be >= 0");
  if (n == 2 && m > 0)
    throw std::invalid_argument("solve_k_gamma: only m = 0 exists for n = 2");
  if (!(tol > 0)) throw std::invalid_argument("solve_k_gamma: tol must be positive");

  const double nu = static_cast<double>(m) * (m + n - 3);
  const double Lambda = gamma * (gamma + n - 2);
  const LinearAngularODE ode{n, mu, nu, Lambda};

  // Lambda(gamma) must keep a relative gap from the spectrum.
  if (Lambda > 0) {
    const double margin = std::max(1.0, 2.0 * gap_tol * std::abs(Lambda));
    for (double lam : spectra::eigenvalues_up_to(n, mu, m, Lambda + margin)) {
      if (std::abs(Lambda - lam) <= gap_tol * std::max(1.0, std::abs(Lambda)))
        throw EigenvalueCollision(Lambda, lam,
                                  "solve_k_gamma: Lambda(gamma) collides with an eigenvalue");
    }
  }

  const auto idx = angular_indices(n, mu, m, Lambda);
  AngularProfile prof;
  prof.kind = AngularProfile::Kind::linear;
  prof.n = n;
  prof.mu = mu;
  prof.nu = nu;
  prof.Lambda = Lambda;

  prof.expansion1 = frobenius::expand(ode, 1, idx.kappa_regular, kSeriesOrder);
  prof.have_expansion1 = true;
  prof.C1 = 1.0;
  prof.normalization = m == 0 ? "k(1) = 1"
                              : "unit leading coefficient of the (1-t)^kappa_+ branch";

  const auto grid =
      detail::graded_grid(kHandoff0, 1.0 - kHandoff1, kProfileNodes, detail::Grading::cubic);
  std::vector<double> rev(grid.rbegin(), grid.rend());

  const double s_anchor = kHandoff1;
  const double k_anchor = prof.expansion1.value(s_anchor);
  const double kd_anchor = -prof.expansion1.derivative(s_anchor);
  const auto res = integrate_interior(ode, 1.0 - kHandoff1, kHandoff0, k_anchor, kd_anchor,
                                      tol, rev);

  std::vector<double> ts(res.ts.rbegin(), res.ts.rend());
  std::vector<double> ks(res.ks.rbegin(), res.ks.rend());
  std::vector<double> kds(res.kdots.rbegin(), res.kdots.rend());

  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;
  const double alpha_minus = 0.5 - disc;
  prof.prefactor = alpha_minus;
  detail::fill_profile_storage(prof, ts, ks, kds);

  prof.basis0_minus = detail::expand_or_truncate(ode, 0, alpha_minus, kSeriesOrder);
  prof.basis0_plus = frobenius::expand(ode, 0, alpha_plus, kSeriesOrder);
  prof.have_bases0 = true;

  const auto fit = detail::fit_origin(prof, prof.basis0_minus, prof.basis0_plus, 1e-6);
  prof.A = fit.A;
  prof.B = fit.B;
  if (!fit.singular)
    throw EigenvalueCollision(Lambda, Lambda,
                              "solve_k_gamma: continued profile is numerically an eigenfunction");

  prof.switch0 =
      std::min(0.08, 0.8 * std::min(prof.basis0_minus.radius, prof.basis0_plus.radius));
  prof.switch0 = std::max(prof.switch0, 2.0 * kHandoff0);
  prof.switch1 = 1.0 - std::min(0.08, 0.8 * prof.expansion1.radius);
  return prof;
}

OriginFit classify_origin_behavior(const AngularProfile& profile, double singular_threshold) {
  if (profile.kind != AngularProfile::Kind::linear)
    throw std::invalid_argument("classify_origin_behavior: linear profiles only");
  const double disc = std::sqrt(0.25 - profile.mu);
  const double gap = 2.0 * disc;
  const LinearAngularODE ode = profile.ode();
  frobenius::Expansion bm = profile.have_bases0
                                ? profile.basis0_minus
                                : detail::expand_or_truncate(ode, 0, 0.5 - disc, kSeriesOrder);
  frobenius::Expansion bp = profile.have_bases0
                                ? profile.basis0_plus
                                : frobenius::expand(ode, 0, 0.5 + disc, kSeriesOrder);
  auto fit = detail::fit_origin(profile, bm, bp, singular_threshold);
  if (gap < 0.05)
    throw IllConditionedFit(fit.condition, fit.A, fit.B,
                            "classify_origin_behavior: alpha_+ - alpha_- < 0.05");
  return fit;
}

}  // namespace hsh
