#include "hsh/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Dense>

#include "hsh/errors.hpp"

namespace hsh::nonlinear {

namespace {

constexpr double kCriticalTol = 1e-12;
constexpr int kBracketGrid = 10000;
constexpr int kMaxDoublings = 60;
constexpr int kLocalSeriesOrder = 20;

double positive_part(double x) { return x > 0 ? x : 0.0; }

// ---------------------------------------------------------------------------
// bracket construction
// ---------------------------------------------------------------------------

std::vector<double> bracket_grid(double lo, double hi, int n) {
  return detail::graded_grid(lo, hi, n, detail::Grading::quadratic);
}

struct BracketScaffold {
  ExponentTable tab;
  double p;
  double Lambda_star;
};

BracketScaffold scaffold(const ProblemParams& params) {
  BracketScaffold s;
  s.tab = derive_exponents(params);
  s.p = *params.p;
  s.Lambda_star = s.tab.lambda(-2.0 / (s.p - 1.0));
  return s;
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

double Bracket::sub(double t) const {
  const double ta = std::pow(t, alpha);
  if (row == 1) return tau * ta;
  return tau * ta * positive_part(1.0 - kappa * std::pow(t, epsilon));
}

double Bracket::super(double t) const {
  const double ta = std::pow(t, alpha);
  switch (row) {
    case 1: return c * ta * (1.0 - kappa * std::pow(t, epsilon));
    case 2: return c * ta;
    default: return c * ta * (1.0 + kappa * std::pow(t, epsilon));
  }
}

double Bracket::sub_defect(double t) const {
  if (row == 1) {
    const double ta = std::pow(t, alpha);
    return tau * ta * (Lambda0 - std::pow(tau, p - 1.0) * std::pow(t, alpha * (p - 1.0)));
  }
  const double te = std::pow(t, epsilon);
  if (1.0 - kappa * te <= 0.0) return 0.0;  // sub vanishes identically there
  const double pref = tau * std::pow(t, alpha + epsilon - 2.0);
  const double inner = Lambda0 * std::pow(t, 2.0 - epsilon) -
                       kappa * epsilon * (2.0 * alpha + epsilon - 1.0) -
                       kappa * Lambda_eps * t * t -
                       std::pow(tau, p - 1.0) *
                           std::pow(t, alpha * (p - 1.0) + 2.0 - epsilon) *
                           std::pow(1.0 - kappa * te, p);
  return pref * inner;
}

double Bracket::super_defect(double t) const {
  const double te = std::pow(t, epsilon);
  if (row == 2) {
    const double ta = std::pow(t, alpha);
    return c * ta * (Lambda0 - std::pow(c, p - 1.0) * std::pow(t, alpha * (p - 1.0)));
  }
  const double pref = c * std::pow(t, alpha + epsilon - 2.0);
  if (row == 1) {
    const double inner = Lambda0 * std::pow(t, 2.0 - epsilon) -
                         kappa * epsilon * (2.0 * alpha + epsilon - 1.0) -
                         kappa * Lambda_eps * t * t -
                         std::pow(c, p - 1.0) *
                             std::pow(t, alpha * (p - 1.0) + 2.0 - epsilon) *
                             std::pow(1.0 - kappa * te, p);
    return pref * inner;
  }
  const double inner = Lambda0 * std::pow(t, 2.0 - epsilon) +
                       kappa * epsilon * (2.0 * alpha + epsilon - 1.0) +
                       kappa * Lambda_eps * t * t -
                       std::pow(c, p - 1.0) *
                           std::pow(t, alpha * (p - 1.0) + 2.0 - epsilon) *
                           std::pow(1.0 + kappa * te, p);
  return pref * inner;
}

double Bracket::sub_defect_scale(double t) const {
  if (row == 1) {
    const double ta = std::pow(t, alpha);
    return tau * ta *
           (std::abs(Lambda0) + std::pow(tau, p - 1.0) * std::pow(t, alpha * (p - 1.0)));
  }
  const double te = std::pow(t, epsilon);
  const double pref = tau * std::pow(t, alpha + epsilon - 2.0);
  return pref * (std::abs(Lambda0) * std::pow(t, 2.0 - epsilon) +
                 kappa * epsilon * std::abs(2.0 * alpha + epsilon - 1.0) +
                 kappa * std::abs(Lambda_eps) * t * t +
                 std::pow(tau, p - 1.0) * std::pow(t, alpha * (p - 1.0) + 2.0 - epsilon) *
                     std::pow(std::abs(1.0 - kappa * te) + 1e-300, p));
}

double Bracket::super_defect_scale(double t) const {
  if (row == 2) {
    const double ta = std::pow(t, alpha);
    return c * ta *
           (std::abs(Lambda0) + std::pow(c, p - 1.0) * std::pow(t, alpha * (p - 1.0)));
  }
  const double te = std::pow(t, epsilon);
  const double pref = c * std::pow(t, alpha + epsilon - 2.0);
  const double mixed = row == 1 ? std::abs(1.0 - kappa * te) : 1.0 + kappa * te;
  return pref * (std::abs(Lambda0) * std::pow(t, 2.0 - epsilon) +
                 kappa * epsilon * std::abs(2.0 * alpha + epsilon - 1.0) +
                 kappa * std::abs(Lambda_eps) * t * t +
                 std::pow(c, p - 1.0) * std::pow(t, alpha * (p - 1.0) + 2.0 - epsilon) *
                     std::pow(mixed + 1e-300, p));
}

namespace {

bool super_certified(const Bracket& b, const std::vector<double>& grid) {
  for (double t : grid) {
    if (b.super_defect(t) > 1e-12 * b.super_defect_scale(t)) return false;
  }
  return true;
}

bool sub_certified(const Bracket& b, const std::vector<double>& grid) {
  for (double t : grid) {
    if (b.sub_defect(t) < -1e-12 * b.sub_defect_scale(t)) return false;
    if (b.sub(t) > b.super(t)) return false;
  }
  return true;
}

// positivity of the kappa bracket for the minus-branch subsolution on
// (0, kappa^{-1/eps}); tau-independent part
bool sub_kappa_positive(const Bracket& b, int n_pts) {
  const double t_hi = std::pow(b.kappa, -1.0 / b.epsilon);
  const auto grid = bracket_grid(1e-9, t_hi * (1.0 - 1e-9), n_pts);
  for (double t : grid) {
    const double inner = b.Lambda0 * std::pow(t, 2.0 - b.epsilon) -
                         b.kappa * b.epsilon * (2.0 * b.alpha + b.epsilon - 1.0) -
                         b.kappa * b.Lambda_eps * t * t;
    if (!(inner > 0)) return false;
  }
  return true;
}

}  // namespace

Bracket build_bracket(const ProblemParams& params, Branch branch) {
  params.validate();
  if (!params.p) throw std::invalid_argument("build_bracket: p required");
  const auto s = scaffold(params);
  const double p = s.p;

  Bracket b;
  b.branch = branch;
  b.n = params.n;
  b.mu = params.mu;
  b.p = p;
  b.Lambda_star = s.Lambda_star;

  const auto grid = bracket_grid(1e-9, 1.0 - 1e-9, kBracketGrid);

  if (branch == Branch::plus) {
    b.alpha = s.tab.alpha_plus;
    b.row = 1;
    b.Lambda0 = s.Lambda_star - s.tab.lambda(b.alpha);
    const bool critical = std::abs(p - s.tab.p_c) <= kCriticalTol * std::max(1.0, s.tab.p_c);
    if (critical || b.Lambda0 <= 0)
      throw NoBracket("build_bracket: plus branch requires p < p_c (Lambda0 > 0)", critical);
    // admissible epsilon: Lambda_eps > 0 and epsilon < 2
    const double g_hat = 2.0 / (p - 1.0) - (params.n - 2);
    b.epsilon = 0.5 * std::min(2.0, g_hat - b.alpha);
    b.kappa = 0.5;
    b.Lambda_eps = s.Lambda_star - s.tab.lambda(b.alpha + b.epsilon);

    b.c = 1.0;
    int i = 0;
    for (; i < kMaxDoublings && !super_certified(b, grid); ++i) b.c *= 2.0;
    if (i == kMaxDoublings) throw SearchExhausted("build_bracket: supersolution constant");
    b.tau = std::min(1.0, 0.5 * b.c * (1.0 - b.kappa));
    for (i = 0; i < kMaxDoublings && !sub_certified(b, grid); ++i) b.tau *= 0.5;
    if (i == kMaxDoublings) throw SearchExhausted("build_bracket: subsolution constant");
  } else {
    b.alpha = s.tab.alpha_minus;
    b.Lambda0 = s.Lambda_star - s.tab.lambda(b.alpha);
    const bool ko_finite = std::isfinite(s.tab.p_KO);
    const bool critical =
        ko_finite && std::abs(p - s.tab.p_KO) <= kCriticalTol * std::max(1.0, s.tab.p_KO);
    if (critical || !(p < s.tab.p_KO))
      throw NoBracket("build_bracket: minus branch requires p < p_KO", critical);
    b.row = b.Lambda0 <= 0 ? 2 : (params.mu > s.tab.mu_star ? 3 : 4);
    b.epsilon = 0.5 * std::min(1.0 - 2.0 * b.alpha, 2.0 + b.alpha * (p - 1.0));
    b.Lambda_eps = s.Lambda_star - s.tab.lambda(b.alpha + b.epsilon);

    // rows 3/4 start the doubling at the natural amplitude unit of the
    // equation, |Lambda*|^{1/(p-1)}, so the supersolution dominates the
    // distinguished profile and not merely some small family member
    const double c_floor =
        b.row >= 3 && s.Lambda_star > 0
            ? std::max(1.0, 2.0 * std::pow(s.Lambda_star, 1.0 / (p - 1.0)))
            : 1.0;

    // kappa > 1 with the subsolution bracket positive on (0, kappa^{-1/eps});
    // rows 3/4 also need the supersolution certificate for some c
    b.kappa = 2.0;
    b.c = c_floor;
    bool done = false;
    for (int ik = 0; ik < kMaxDoublings && !done; ++ik) {
      if (sub_kappa_positive(b, 2000)) {
        b.c = c_floor;
        for (int ic = 0; ic < kMaxDoublings; ++ic) {
          if (super_certified(b, grid)) {
            done = true;
            break;
          }
          b.c *= 2.0;
        }
      }
      if (!done) b.kappa *= 2.0;
    }
    if (!done) throw SearchExhausted("build_bracket: minus-branch kappa/c search");
    b.tau = std::min(1.0, b.c);
    int i = 0;
    for (; i < kMaxDoublings && !sub_certified(b, grid); ++i) b.tau *= 0.5;
    if (i == kMaxDoublings) throw SearchExhausted("build_bracket: subsolution constant");
  }

  // certify at double resolution
  const auto grid2 = bracket_grid(1e-9, 1.0 - 1e-9, 2 * kBracketGrid);
  if (!super_certified(b, grid2) || !sub_certified(b, grid2))
    throw SearchExhausted("build_bracket: certificate failed at double resolution");
  return b;
}

// ---------------------------------------------------------------------------
// monotone iteration solver
// ---------------------------------------------------------------------------

namespace {

double int_power(double a, double b, double e) {
  if (std::abs(e + 1.0) < 1e-9) return std::log(b / a);
  return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

// integral of t^e (1-t^2)^{(n-3)/2} over [a,b]. Near the endpoints the power
// factor carrying the local singularity is integrated exactly with the rest
// frozen at the cell midpoint; resolved interior cells use 4-point Gauss.
double cell_weight(double a, double b, double e, int n, double t_node) {
  (void)t_node;
  const double nu0 = 0.5 * (n - 3);
  if (b <= 0.05) {
    const double tm = 0.5 * (a + b);
    const double q = std::pow((1.0 - tm) * (1.0 + tm), nu0);
    return q * int_power(a, b, e);
  }
  if (a >= 0.95) {
    const double tm = 0.5 * (a + b);
    const double smooth = std::pow(tm, e) * std::pow(1.0 + tm, nu0);
    const double integral =
        (std::pow(1.0 - a, nu0 + 1.0) - std::pow(1.0 - b, nu0 + 1.0)) / (nu0 + 1.0);
    return smooth * integral;
  }
  if (a < 0.05) return cell_weight(a, 0.05, e, n, t_node) + cell_weight(0.05, b, e, n, t_node);
  if (b > 0.95) return cell_weight(a, 0.95, e, n, t_node) + cell_weight(0.95, b, e, n, t_node);
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0;
  for (int k = 0; k < 4; ++k) {
    const double t = mid + half * gx[k];
    acc += gw[k] * std::pow(t, e) * std::pow((1.0 - t) * (1.0 + t), nu0);
  }
  return acc * half;
}

struct MonotoneResult {
  std::vector<double> y;  // y = v / t^alpha at the nodes
  double y1_corr = 0;     // coefficient of the t^delta local correction
  int iterations = 0;
  double final_change = 0;
  double residual = 0;
  double containment_violation = 0;
};

class AngularSolver {
 public:
  AngularSolver(const Bracket& br, const SolveOptions& opts) : b_(br), o_(opts) {
    setup_grid();
    setup_coefficients();
  }

  const std::vector<double>& grid() const { return t_; }
  double delta() const { return delta_; }
  bool corrected() const { return use_corr_; }
  double y_super_bounded(size_t i) const { return ysupb_[i]; }
  double y_sub_bounded(size_t i) const { return ysubb_[i]; }

  // g_dirichlet < 0 means no Dirichlet closure (plus branch zero-flux cell)
  MonotoneResult run_monotone(double g_dirichlet) const {
    const size_t N = t_.size();
    std::vector<double> y(N), z(N), ynew(N);
    for (size_t i = 0; i < N; ++i) y[i] = o_.super_scale * ysupb_[i];
    if (g_dirichlet >= 0) y[0] = g_dirichlet;

    MonotoneResult out;
    const double yscale = *std::max_element(ysupb_.begin(), ysupb_.end()) * o_.super_scale;
    double y1 = 0;

    std::vector<double> diag(N), rhs(N);
    int iter = 0;
    for (; iter < o_.max_iterations; ++iter) {
      y1 = correction_coefficient(y);
      for (size_t i = 0; i < N; ++i) {
        diag[i] = -(low_[i] + up_[i]) - qshift_[i];
        const double ci = corr_value(y1, t_[i]);
        rhs[i] = Q_[i] * std::pow(y[i], b_.p) - P_[i] * Lambda0_ * y[i] -
                 qshift_[i] * y[i] - corr_lhs(y1, i) + qshift_[i] * ci;
      }
      if (g_dirichlet >= 0) {
        diag[0] = 1.0;
        // up_[0] must not couple; emulate by moving it to rhs of row 1 via z0
        rhs[0] = g_dirichlet - corr_value(y1, t_[0]);
      }
      thomas(diag, rhs, g_dirichlet >= 0, z);
      double change = 0, viol = 0;
      for (size_t i = 0; i < N; ++i) {
        ynew[i] = z[i] + corr_value(y1, t_[i]);
        change = std::max(change, std::abs(ynew[i] - y[i]));
        viol = std::max(viol, ynew[i] - y[i]);  // monotone decrease expected
      }
      if (iter > 2 && viol > 1e-7 * yscale)
        throw MonotonicityViolation("solve_profile: iterate increased by " +
                                    std::to_string(viol / yscale) + " (relative)");
      for (size_t i = 0; i < N; ++i) {
        out.containment_violation =
            std::max(out.containment_violation,
                     std::max(ysubb_[i] - ynew[i], ynew[i] - o_.super_scale * ysupb_[i]) /
                         std::max(1.0, yscale));
      }
      y.swap(ynew);
      if (iter > 4 && change <= 0.2 * o_.tol * std::max(1.0, yscale)) {
        const double res = residual(y, y1);
        out.final_change = change / std::max(1.0, yscale);
        out.residual = res;
        // stop on a met residual target, or once the updates have collapsed
        // four orders below it (the residual then reports what was reached)
        if (res <= o_.tol || change <= 1e-4 * o_.tol * std::max(1.0, yscale)) break;
      }
    }
    if (iter == o_.max_iterations)
      throw Error("solve_profile: monotone iteration did not converge");
    out.iterations = iter + 1;
    out.y = std::move(y);
    out.y1_corr = y1;
    if (out.residual == 0) out.residual = residual(out.y, out.y1_corr);
    return out;
  }

  // damped Newton on the same discretization; the fractional local
  // correction is slaved to the current amplitude across a few outer passes
  std::vector<double> run_newton(std::vector<double> y, int max_iter = 200) const {
    const size_t N = t_.size();
    for (int pass = 0; pass < 3; ++pass) {
      const double y1 = correction_coefficient(y);
      std::vector<double> z(N), F(N), diag(N), step(N);
      for (size_t i = 0; i < N; ++i) z[i] = y[i] - corr_value(y1, t_[i]);
      auto eval_F = [&](const std::vector<double>& zz, std::vector<double>& f) {
        for (size_t i = 0; i < N; ++i) {
          double flux = corr_lhs(y1, i);
          if (i + 1 < N) flux += up_[i] * (zz[i + 1] - zz[i]);
          if (i > 0) flux -= low_[i] * (zz[i] - zz[i - 1]);
          const double yy = zz[i] + corr_value(y1, t_[i]);
          f[i] = flux - Q_[i] * std::pow(yy, b_.p) + P_[i] * Lambda0_ * yy;
        }
      };
      auto norm = [&](const std::vector<double>& f) {
        double s = 0;
        for (size_t i = 0; i < N; ++i) s = std::max(s, std::abs(f[i]) / fscale_[i]);
        return s;
      };
      eval_F(z, F);
      double fn = norm(F);
      for (int it = 0; it < max_iter && fn >= 1e-14; ++it) {
        for (size_t i = 0; i < N; ++i) {
          const double yy = z[i] + corr_value(y1, t_[i]);
          diag[i] = -(low_[i] + up_[i]) + P_[i] * Lambda0_ -
                    b_.p * Q_[i] * std::pow(yy, b_.p - 1.0);
        }
        std::vector<double> rhs(N);
        for (size_t i = 0; i < N; ++i) rhs[i] = -F[i];
        thomas(diag, rhs, false, step);
        double theta = 1.0;
        std::vector<double> ztrial(N), Ftrial(N);
        bool advanced = false;
        for (int cut = 0; cut < 50; ++cut) {
          bool positive = true;
          for (size_t i = 0; i < N; ++i) {
            ztrial[i] = z[i] + theta * step[i];
            if (!(ztrial[i] + corr_value(y1, t_[i]) > 0)) positive = false;
          }
          if (positive) {
            eval_F(ztrial, Ftrial);
            const double fn_trial = norm(Ftrial);
            if (fn_trial < fn) {
              z.swap(ztrial);
              F.swap(Ftrial);
              fn = fn_trial;
              advanced = true;
              break;
            }
          }
          theta *= 0.5;
        }
        if (!advanced) break;  // stalled; caller checks the residual
      }
      for (size_t i = 0; i < N; ++i) y[i] = z[i] + corr_value(y1, t_[i]);
    }
    return y;
  }

  // first/second derivatives at node i of the corrected unknown via a local
  // quartic fit over five nodes (three near the boundary nodes, where the
  // graded spacing is already fine)
  void node_derivatives(const std::vector<double>& z, size_t i, double& zd, double& zdd,
                        double& zd_noise, double& zdd_noise) const {
    constexpr double eps = 2.2e-16;
    const size_t N = t_.size();
    if (i >= 2 && i + 2 < N) {
      const size_t j0 = i - 2;
      double d[5], scale = 0;
      for (int k = 0; k < 5; ++k) {
        d[k] = t_[j0 + k] - t_[i];
        scale = std::max(scale, std::abs(d[k]));
      }
      Eigen::Matrix<double, 5, 5> V;
      for (int k = 0; k < 5; ++k) {
        const double x = d[k] / scale;
        double pw = 1.0;
        for (int m = 0; m < 5; ++m) {
          V(k, m) = pw;
          pw *= x;
        }
      }
      const Eigen::Matrix<double, 5, 5> Vinv = V.fullPivLu().inverse();
      zd = 0.0;
      zdd = 0.0;
      zd_noise = 0.0;
      zdd_noise = 0.0;
      for (int k = 0; k < 5; ++k) {
        const double w1 = Vinv(1, k) / scale;
        const double w2 = 2.0 * Vinv(2, k) / (scale * scale);
        const double zk = z[j0 + k];
        zd += w1 * zk;
        zdd += w2 * zk;
        zd_noise += eps * std::abs(w1 * zk);
        zdd_noise += eps * std::abs(w2 * zk);
      }
      return;
    }
    const double h1 = t_[i] - t_[i - 1];
    const double h2 = t_[i + 1] - t_[i];
    const double w1[3] = {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2),
                          h1 / (h2 * (h1 + h2))};
    const double w2[3] = {2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))};
    zd = 0.0;
    zdd = 0.0;
    zd_noise = 0.0;
    zdd_noise = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double zk = z[i - 1 + k];
      zd += w1[k] * zk;
      zdd += w2[k] * zk;
      zd_noise += eps * std::abs(w1[k] * zk);
      zdd_noise += eps * std::abs(w2[k] * zk);
    }
  }

  double residual(const std::vector<double>& y, double y1) const {
    const size_t N = t_.size();
    std::vector<double> z(N);
    for (size_t i = 0; i < N; ++i) z[i] = y[i] - corr_value(y1, t_[i]);
    double worst = 0;
    for (size_t i = 1; i + 1 < N; ++i) {
      double zd, zdd, zd_noise, zdd_noise;
      node_derivatives(z, i, zd, zdd, zd_noise, zdd_noise);
      const double t = t_[i];
      const double yv = z[i] + corr_value(y1, t);
      const double yd = zd + corr_derivative(y1, t);
      const double ydd = zdd + corr_second(y1, t);
      const double ta = std::pow(t, b_.alpha);
      const double v = ta * yv;
      const double vd = ta * (yd + b_.alpha * yv / t);
      const double vdd = ta * (ydd + 2.0 * b_.alpha * yd / t +
                               b_.alpha * (b_.alpha - 1.0) * yv / (t * t));
      const double one_m_t2 = (1.0 - t) * (1.0 + t);
      const double res = one_m_t2 * vdd - (b_.n - 1) * t * vd +
                         (b_.mu / (t * t) + b_.Lambda_star) * v - std::pow(v, b_.p);
      const double scale = std::abs(one_m_t2 * vdd) + std::abs((b_.n - 1) * t * vd) +
                           (std::abs(b_.mu) / (t * t) + std::abs(b_.Lambda_star)) *
                               std::abs(v) +
                           std::pow(std::abs(v), b_.p) + 1e-300;
      // certified measurement-noise floor of the stencil derivatives; the
      // residual reports only the excess above it
      const double vd_noise = ta * zd_noise;
      const double vdd_noise = ta * (zdd_noise + 2.0 * std::abs(b_.alpha) * zd_noise / t);
      const double noise =
          8.0 * (std::abs(one_m_t2) * vdd_noise + (b_.n - 1) * t * vd_noise);
      worst = std::max(worst, std::max(0.0, std::abs(res) - noise) / scale);
    }
    return worst;
  }

  double correction_coefficient(const std::vector<double>& y) const {
    if (!use_corr_) return 0.0;
    const double amp = amplitude(y);
    return std::pow(std::max(amp, 0.0), b_.p) / (delta_ * (2.0 * b_.alpha + delta_ - 1.0));
  }

  double amplitude(const std::vector<double>& y) const {
    // y ~ amp * f1(t) near the first node
    return y[0] / f1_.series(t_[0]);
  }

  double corr_value(double y1, double t) const {
    return use_corr_ ? y1 * std::pow(t, delta_) : 0.0;
  }

 private:
  double corr_derivative(double y1, double t) const {
    return use_corr_ ? y1 * delta_ * std::pow(t, delta_ - 1.0) : 0.0;
  }
  double corr_second(double y1, double t) const {
    return use_corr_ ? y1 * delta_ * (delta_ - 1.0) * std::pow(t, delta_ - 2.0) : 0.0;
  }

  // sigma-weighted flux of the correction at an interior face
  double corr_flux(double y1, double t) const {
    if (!use_corr_) return 0.0;
    const double sig = std::pow(t, 2.0 * b_.alpha) *
                       std::pow((1.0 - t) * (1.0 + t), 0.5 * (b_.n - 1));
    return sig * corr_derivative(y1, t);
  }

  // flux difference of the correction over the cell of node i; the boundary
  // faces carry zero flux (t^{2 alpha + delta - 1} -> 0 at t=0, sigma(1) = 0)
  double corr_lhs(double y1, size_t i) const {
    if (!use_corr_) return 0.0;
    const double right = i + 1 < t_.size() ? corr_flux(y1, face_[i]) : 0.0;
    const double left = i > 0 ? corr_flux(y1, face_[i - 1]) : 0.0;
    return right - left;
  }

  void setup_grid() {
    const int N = std::max(o_.nodes, 201);
    auto full = detail::graded_grid(0.0, 1.0, N, detail::Grading::quadratic);
    if (b_.branch == Branch::plus) {
      t_ = full;
    } else {
      t_.assign(full.begin() + 1, full.end());
    }
    face_.resize(t_.size() - 1);
    for (size_t i = 0; i + 1 < t_.size(); ++i) face_[i] = 0.5 * (t_[i] + t_[i + 1]);
  }

  void setup_coefficients() {
    const size_t N = t_.size();
    delta_ = b_.alpha * (b_.p - 1.0) + 2.0;
    use_corr_ = delta_ < 3.9 && std::abs(2.0 * b_.alpha + delta_ - 1.0) > 1e-6;
    Lambda0_ = b_.Lambda0;

    const LinearAngularODE hom{b_.n, b_.mu, 0.0, b_.Lambda_star};
    f1_ = detail::expand_or_truncate(hom, 0, b_.alpha, kLocalSeriesOrder);

    low_.assign(N, 0.0);
    up_.assign(N, 0.0);
    P_.assign(N, 0.0);
    Q_.assign(N, 0.0);
    qshift_.assign(N, 0.0);
    ysupb_.resize(N);
    ysubb_.resize(N);
    fscale_.assign(N, 1.0);

    auto sigma = [&](double t) {
      return std::pow(t, 2.0 * b_.alpha) *
             std::pow((1.0 - t) * (1.0 + t), 0.5 * (b_.n - 1));
    };
    for (size_t i = 0; i + 1 < N; ++i) {
      const double sf = sigma(face_[i]);
      up_[i] = sf / (t_[i + 1] - t_[i]);
      low_[i + 1] = sf / (t_[i + 1] - t_[i]);
    }
    const double e_lin = 2.0 * b_.alpha;
    const double e_nl = b_.alpha * (b_.p + 1.0);
    for (size_t i = 0; i < N; ++i) {
      const double a = i == 0 ? (b_.branch == Branch::plus ? 0.0 : t_[0]) : face_[i - 1];
      const double bnd = i + 1 < N ? face_[i] : 1.0;
      if (bnd > a) {
        P_[i] = cell_weight(a, bnd, e_lin, b_.n, t_[i]);
        Q_[i] = cell_weight(a, bnd, e_nl, b_.n, t_[i]);
      }
      const double te = std::pow(t_[i], b_.epsilon);
      switch (b_.row) {
        case 1:
          ysupb_[i] = b_.c * (1.0 - b_.kappa * te);
          ysubb_[i] = b_.tau;
          break;
        case 2:
          ysupb_[i] = b_.c;
          ysubb_[i] = b_.tau * positive_part(1.0 - b_.kappa * te);
          break;
        default:
          ysupb_[i] = b_.c * (1.0 + b_.kappa * te);
          ysubb_[i] = b_.tau * positive_part(1.0 - b_.kappa * te);
          break;
      }
      qshift_[i] = o_.shift_margin * b_.p * Q_[i] *
                       std::pow(o_.super_scale * ysupb_[i], b_.p - 1.0) +
                   P_[i] * std::max(0.0, -Lambda0_);
      fscale_[i] = (low_[i] + up_[i]) * std::max(1.0, ysupb_[i]) +
                   Q_[i] * std::pow(ysupb_[i], b_.p) +
                   P_[i] * std::abs(Lambda0_) * ysupb_[i] + 1e-300;
    }
  }

  void thomas(const std::vector<double>& diag, const std::vector<double>& rhs,
              bool dirichlet_first, std::vector<double>& x) const {
    const size_t N = t_.size();
    cwork_.resize(N);
    dwork_.resize(N);
    double b0 = diag[0];
    double c0 = dirichlet_first ? 0.0 : up_[0];
    cwork_[0] = c0 / b0;
    dwork_[0] = rhs[0] / b0;
    for (size_t i = 1; i < N; ++i) {
      const double a = low_[i];
      const double m = diag[i] - a * cwork_[i - 1];
      cwork_[i] = (i + 1 < N ? up_[i] : 0.0) / m;
      dwork_[i] = (rhs[i] - a * dwork_[i - 1]) / m;
    }
    x.resize(N);
    x[N - 1] = dwork_[N - 1];
    for (size_t i = N - 1; i-- > 0;) x[i] = dwork_[i] - cwork_[i] * x[i + 1];
  }

  Bracket b_;
  SolveOptions o_;
  std::vector<double> t_, face_;
  std::vector<double> low_, up_, P_, Q_, qshift_, ysupb_, ysubb_, fscale_;
  mutable std::vector<double> cwork_, dwork_;
  frobenius::Expansion f1_;
  double delta_ = 0;
  bool use_corr_ = false;
  double Lambda0_ = 0;

 public:
  const frobenius::Expansion& f1() const { return f1_; }
};

}  // namespace

// defined below; needs AngularSolver
static NonlinearProfile assemble_nonlinear_profile(const Bracket& b, const SolveOptions& o,
                                                   const AngularSolver& solver,
                                                   const MonotoneResult& mr,
                                                   double b_admixture);

namespace {

// fitted coefficients of y ~ A f1(t) + B t^{gap} f0(t) over nodes in
// [t_fit_lo, t_fit_hi]; the local correction must already be subtracted
struct MinusFit {
  double A = 0, B = 0;
};

MinusFit fit_minus_admixture(const AngularSolver& solver, const Bracket& b,
                             const std::vector<double>& y, double y1) {
  const double disc = std::sqrt(0.25 - b.mu);
  const double gap = 2.0 * disc;
  const LinearAngularODE hom{b.n, b.mu, 0.0, b.Lambda_star};
  const auto f0 = detail::expand_or_truncate(hom, 0, 0.5 + disc, kLocalSeriesOrder);
  const auto& f1 = solver.f1();
  const auto& t = solver.grid();

  std::vector<size_t> nodes;
  const double lo = 8e-4, hi = 0.02;
  double target = lo;
  for (size_t i = 0; i < t.size() && nodes.size() < 16; ++i) {
    if (t[i] >= target && t[i] <= hi) {
      nodes.push_back(i);
      target = t[i] * 1.25;
    }
  }
  if (nodes.size() < 6) throw Error("fit_minus_admixture: too few collocation nodes");

  // second-order local corrections ride along as extra columns so they do not
  // bias the admixture coefficient
  const double delta = solver.delta();
  std::vector<double> extra;
  for (double e : {2.0 * delta, delta + 2.0}) {
    if (e > 6.0) continue;
    bool dup = std::abs(e - gap) < 0.05;
    for (double have : extra)
      if (std::abs(e - have) < 0.05) dup = true;
    if (!dup) extra.push_back(e);
  }

  const int cols = 2 + static_cast<int>(extra.size());
  Eigen::MatrixXd M(nodes.size(), cols);
  Eigen::VectorXd rhs(nodes.size());
  for (size_t j = 0; j < nodes.size(); ++j) {
    const double tj = t[nodes[j]];
    M(j, 0) = f1.series(tj);
    M(j, 1) = std::pow(tj, gap) * f0.series(tj);
    for (size_t k = 0; k < extra.size(); ++k) M(j, 2 + k) = std::pow(tj, extra[k]);
    rhs(j) = y[nodes[j]] - solver.corr_value(y1, tj);
  }
  Eigen::VectorXd colscale(cols);
  for (int c = 0; c < cols; ++c) {
    colscale(c) = M.col(c).cwiseAbs().maxCoeff() + 1e-300;
    M.col(c) /= colscale(c);
  }
  Eigen::VectorXd sol = M.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  return {sol(0) / colscale(0), sol(1) / colscale(1)};
}

}  // namespace

NonlinearProfile solve_profile(const ProblemParams& params, Branch branch, double tol) {
  SolveOptions o;
  o.tol = tol;
  return solve_profile(params, branch, o);
}

NonlinearProfile solve_profile(const ProblemParams& params, Branch branch,
                               const SolveOptions& opts) {
  const Bracket b = build_bracket(params, branch);

  SolveOptions o = opts;
  for (int attempt = 0;; ++attempt) {
    try {
      AngularSolver solver(b, o);
      if (branch == Branch::plus) {
        const auto mr = solver.run_monotone(-1.0);
        return assemble_nonlinear_profile(b, o, solver, mr, 0.0);
      }
      if (b.row == 2) {
        const double g_lo = solver.y_sub_bounded(0);
        const double g_hi = o.super_scale * solver.y_super_bounded(0);
        const auto mr = solver.run_monotone(0.5 * (g_lo + g_hi));
        const auto fit = fit_minus_admixture(solver, b, mr.y, mr.y1_corr);
        return assemble_nonlinear_profile(b, o, solver, mr, fit.B);
      }
      // rows 3/4: secant on the Dirichlet value targeting zero t^{alpha_+}
      // admixture (the distinguished pure-t^{alpha_-} profile). When the
      // admixture cannot be zeroed inside the bracket, the supersolution is
      // enlarged and the search repeated.
      Bracket bb = b;
      MonotoneResult best;
      MinusFit best_fit;
      double prev_best = kInf;
      for (int enlarge = 0; enlarge < 7; ++enlarge) {
        AngularSolver sv(bb, o);
        const double g_lo = sv.y_sub_bounded(0);
        const double g_hi = o.super_scale * sv.y_super_bounded(0);
        double g0 = 0.35 * g_lo + 0.65 * g_hi;
        double g1 = 0.15 * g_lo + 0.85 * g_hi;
        auto mr0 = sv.run_monotone(g0);
        auto fit0 = fit_minus_admixture(sv, bb, mr0.y, mr0.y1_corr);
        best = mr0;
        best_fit = fit0;
        auto mr1 = sv.run_monotone(g1);
        auto fit1 = fit_minus_admixture(sv, bb, mr1.y, mr1.y1_corr);
        if (std::abs(fit1.B) < std::abs(fit0.B)) {
          best = mr1;
          best_fit = fit1;
        }
        for (int it = 0; it < 10; ++it) {
          if (std::abs(best_fit.B) <= 1e-9 * std::max(std::abs(best_fit.A), 1e-30)) break;
          const double dB = fit1.B - fit0.B;
          if (dB == 0) break;
          double g2 = g1 - fit1.B * (g1 - g0) / dB;
          g2 = std::clamp(g2, g_lo + 1e-3 * (g_hi - g_lo), g_hi);
          if (std::abs(g2 - g1) < 1e-14 * std::max(1.0, std::abs(g1))) break;
          auto mr2 = sv.run_monotone(g2);
          auto fit2 = fit_minus_admixture(sv, bb, mr2.y, mr2.y1_corr);
          if (std::abs(fit2.B) < std::abs(best_fit.B)) {
            best = mr2;
            best_fit = fit2;
          }
          g0 = g1;
          fit0 = fit1;
          g1 = g2;
          fit1 = fit2;
        }
        const double rel = std::abs(best_fit.B) /
                           (std::abs(best_fit.A) + std::abs(best_fit.B) + 1e-300);
        if (rel <= 1e-8) return assemble_nonlinear_profile(bb, o, sv, best, best_fit.B);
        if (rel > 0.5 * prev_best) {
          // enlargement is not helping: the admixture-free member does not sit
          // in reach; report the best bracketed solution found
          return assemble_nonlinear_profile(bb, o, sv, best, best_fit.B);
        }
        prev_best = rel;
        bb.c *= 2.0;  // keeps the supersolution certificate (the c-term only grows)
      }
      AngularSolver sv(bb, o);
      return assemble_nonlinear_profile(bb, o, sv, best, best_fit.B);
    } catch (const MonotonicityViolation&) {
      if (attempt >= 1) throw;
      o.nodes = 2 * o.nodes - 1;  // refine once, then give up
    }
  }
}

static NonlinearProfile assemble_nonlinear_profile(const Bracket& b, const SolveOptions&,
                                                   const AngularSolver& solver,
                                                   const MonotoneResult& mr,
                                                   double b_admixture) {
  NonlinearProfile prof;
  prof.branch = b.branch;
  prof.bracket = b;
  prof.residual_sup = mr.residual;
  prof.iterations = mr.iterations;
  prof.final_change = mr.final_change;
  prof.b_admixture = b_admixture;

  AngularProfile& ap = prof.profile;
  ap.kind = AngularProfile::Kind::nonlinear;
  ap.n = b.n;
  ap.mu = b.mu;
  ap.p = b.p;
  ap.Lambda_star = b.Lambda_star;
  ap.prefactor = b.alpha;
  ap.normalization = "v(t)/t^alpha -> v_limit as t -> 0";

  const auto& t = solver.grid();
  const auto& y = mr.y;
  const size_t N = t.size();
  const size_t first = b.branch == Branch::plus ? 1 : 0;  // drop the t=0 node
  ap.grid.assign(t.begin() + first, t.end());
  ap.y.assign(y.begin() + first, y.end());
  ap.dy.resize(ap.grid.size());
  ap.ddy.resize(ap.grid.size());

  const double y1 = mr.y1_corr;
  for (size_t k = 0; k < ap.grid.size(); ++k) {
    const size_t i = k + first;
    double zd;
    if (i == 0) {
      const double h = t[1] - t[0];
      zd = (y[1] - solver.corr_value(y1, t[1]) - (y[0] - solver.corr_value(y1, t[0]))) / h;
    } else if (i + 1 == N) {
      const double h = t[N - 1] - t[N - 2];
      zd = ((y[N - 1] - solver.corr_value(y1, t[N - 1])) -
            (y[N - 2] - solver.corr_value(y1, t[N - 2]))) / h;
    } else {
      const double h1 = t[i] - t[i - 1];
      const double h2 = t[i + 1] - t[i];
      const double z0 = y[i - 1] - solver.corr_value(y1, t[i - 1]);
      const double z1v = y[i] - solver.corr_value(y1, t[i]);
      const double z2 = y[i + 1] - solver.corr_value(y1, t[i + 1]);
      zd = (-h2 / (h1 * (h1 + h2))) * z0 + ((h2 - h1) / (h1 * h2)) * z1v +
           (h1 / (h2 * (h1 + h2))) * z2;
    }
    const double tc = ap.grid[k];
    const double corr_d =
        solver.corrected() ? y1 * solver.delta() * std::pow(tc, solver.delta() - 1.0) : 0.0;
    ap.dy[k] = zd + corr_d;
    // y'' from the equation in y-form
    const double one_m_t2 = (1.0 - tc) * (1.0 + tc);
    const double a = b.alpha;
    const double v = std::pow(tc, a) * ap.y[k];
    const double rhs_y = std::pow(tc, a * (b.p - 1.0)) * std::pow(ap.y[k], b.p) -
                         b.Lambda0 * ap.y[k];
    if (one_m_t2 > 1e-12) {
      ap.ddy[k] = (rhs_y - (2.0 * a * one_m_t2 / tc - (b.n - 1) * tc) * ap.dy[k]) / one_m_t2;
    } else {
      ap.ddy[k] = 0.0;  // not used: the last Hermite cell only needs left data... keep finite
    }
    (void)v;
  }
  // second derivative at t=1 via one-sided difference of dy
  if (ap.grid.size() >= 2) {
    const size_t K = ap.grid.size() - 1;
    ap.ddy[K] = (ap.dy[K] - ap.dy[K - 1]) / (ap.grid[K] - ap.grid[K - 1]);
  }

  // local model near 0: amplitude * f1-series + leading correction
  const double amp = solver.amplitude(y);
  prof.v_limit = amp;
  const auto& f1 = solver.f1();
  ap.model0.powers.clear();
  ap.model0.coeffs.clear();
  for (size_t j = 0; j < f1.coeffs.size(); ++j) {
    ap.model0.powers.push_back(b.alpha + static_cast<double>(j));
    ap.model0.coeffs.push_back(amp * f1.coeffs[j]);
  }
  if (solver.corrected()) {
    ap.model0.powers.push_back(b.alpha + solver.delta());
    ap.model0.coeffs.push_back(y1);
  }
  ap.switch0 = ap.grid.front();
  ap.switch1 = 2.0;  // grid reaches t = 1
  ap.have_bases0 = false;
  ap.have_expansion1 = false;
  return prof;
}

// ---------------------------------------------------------------------------
// integral identity, uniqueness, evaluation
// ---------------------------------------------------------------------------

double integral_identity_defect(int n, double mu, double p,
                                const std::function<double(double)>& v,
                                double alpha_decay_at_0, double boundary_amplitude) {
  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;
  if (alpha_decay_at_0 + alpha_plus <= -1.0)
    throw DivergentIntegral("integral identity: weight v t^{alpha_+} not integrable at 0");
  if (p * alpha_decay_at_0 + alpha_plus <= -1.0)
    throw DivergentIntegral("integral identity: weight v^p t^{alpha_+} not integrable at 0");

  const double Lambda_star = (-2.0 / (p - 1.0)) * (-2.0 / (p - 1.0) + n - 2);
  const double Lambda0 = Lambda_star - alpha_plus * (alpha_plus + n - 2);
  const double nu0 = 0.5 * (n - 3);

  boost::math::quadrature::tanh_sinh<double> quad(12);
  auto w = [&](double t) {
    return std::pow((1.0 - t) * (1.0 + t), nu0) * std::pow(t, alpha_plus);
  };
  const double I1 = quad.integrate([&](double t) { return w(t) * v(t); }, 0.0, 1.0);
  const double I2 =
      quad.integrate([&](double t) { return w(t) * std::pow(v(t), p); }, 0.0, 1.0);
  // profiles that carry the t^{alpha_-} behavior leave the boundary flux
  // sigma (phi' v - v' phi) -> A (alpha_+ - alpha_-) at t = 0
  const double flux = boundary_amplitude * 2.0 * disc;
  return std::abs(Lambda0 * I1 - I2 + flux) /
         (std::abs(Lambda0 * I1) + std::abs(I2) + std::abs(flux));
}

double integral_identity_check(const NonlinearProfile& prof) {
  const double amplitude = prof.branch == Branch::minus ? prof.v_limit : 0.0;
  return integral_identity_defect(
      prof.bracket.n, prof.bracket.mu, prof.bracket.p,
      [&](double t) { return prof.profile.value(t); }, prof.bracket.alpha, amplitude);
}

UniquenessReport check_uniqueness_plus(const ProblemParams& params, int n_starts, double tol,
                                       unsigned seed) {
  params.validate();
  if (!params.p) throw std::invalid_argument("check_uniqueness_plus: p required");
  if (n_starts < 2) throw std::invalid_argument("check_uniqueness_plus: need >= 2 starts");
  const auto tab = derive_exponents(params);
  const double p = *params.p;
  const double Lambda_star = tab.lambda(-2.0 / (p - 1.0));
  if (!(Lambda_star - tab.lambda(tab.alpha_plus) > 0))
    throw NoBracket("check_uniqueness_plus: requires Lambda0 > 0 (p < p_c)");

  UniquenessReport rep;
  rep.n_starts = n_starts;
  rep.tol = tol;
  rep.seed = seed;

  const Bracket b = build_bracket(params, Branch::plus);
  SolveOptions o;
  o.tol = 1e-9;
  AngularSolver solver(b, o);
  const auto& t = solver.grid();
  const size_t N = t.size();

  std::vector<std::vector<double>> limits;
  const double scales[3] = {1.0, 1.5, 2.2};
  const int n_monotone = std::min(3, n_starts);
  for (int i = 0; i < n_monotone; ++i) {
    SolveOptions oi = o;
    oi.super_scale = scales[i];
    AngularSolver si(b, oi);
    auto mr = si.run_monotone(-1.0);
    limits.push_back(std::move(mr.y));
    rep.start_labels.push_back("monotone from " + std::to_string(scales[i]) + "x super");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uphase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> uamp(0.15, 0.45);
  std::uniform_real_distribution<double> umid(0.3, 0.7);
  for (int i = n_monotone; i < n_starts; ++i) {
    const double phase = uphase(rng);
    const double amp = uamp(rng);
    const double mid = umid(rng);
    std::vector<double> y0(N);
    for (size_t j = 0; j < N; ++j) {
      double xi = mid + amp * std::sin(6.0 * t[j] + phase);
      xi = std::clamp(xi, 0.05, 0.95);
      y0[j] = solver.y_sub_bounded(j) +
              xi * (solver.y_super_bounded(j) - solver.y_sub_bounded(j));
    }
    auto yn = solver.run_newton(std::move(y0));
    const double res = solver.residual(yn, solver.correction_coefficient(yn));
    if (res > 1e-6)
      throw Error("check_uniqueness_plus: newton start did not reach a solution, residual " +
                  std::to_string(res));
    limits.push_back(std::move(yn));
    rep.start_labels.push_back("damped newton, random start " + std::to_string(i));
  }

  double wmax = 0;
  for (const auto& w : limits)
    for (double v : w) wmax = std::max(wmax, std::abs(v));
  double diff = 0;
  for (size_t a = 0; a < limits.size(); ++a)
    for (size_t bb = a + 1; bb < limits.size(); ++bb)
      for (size_t j = 0; j < N; ++j)
        diff = std::max(diff, std::abs(limits[a][j] - limits[bb][j]));
  rep.max_pairwise_diff = diff / std::max(1.0, wmax);
  rep.agree = rep.max_pairwise_diff <= tol;

  rep.w0_all_positive = true;
  for (const auto& w : limits) {
    const double w0 = solver.amplitude(w);
    rep.w0_values.push_back(w0);
    if (!(w0 > 0)) rep.w0_all_positive = false;
  }
  return rep;
}

double eval_solution(const NonlinearProfile& prof, std::span<const double> x) {
  if (x.size() != static_cast<size_t>(prof.bracket.n))
    throw std::invalid_argument("eval_solution: point dimension mismatch");
  if (!(x[0] > 0)) throw std::domain_error("eval_solution: x1 must be positive");
  double r2 = 0;
  for (double xi : x) r2 += xi * xi;
  const double r = std::sqrt(r2);
  return std::pow(r, -2.0 / (prof.bracket.p - 1.0)) * prof.profile.value(x[0] / r);
}

}  // namespace hsh::nonlinear
