#include "hsh/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "hsh/errors.hpp"
#include "hsh/exponents.hpp"

namespace hsh::spectra {

namespace {

constexpr double kHandoff0 = 1e-3;
constexpr double kHandoff1 = 1e-3;
constexpr double kMatchPoint = 0.5;
constexpr int kSeriesOrder = 14;
constexpr int kProfileNodes = 2000;
constexpr int kCountSamples = 400;

struct ShotPair {
  double w = 0;  // scaled Wronskian mismatch at the matching point
  // matched states
  double kL = 0, kdL = 0, kR = 0, kdR = 0;
  std::vector<double> tsL, ksL, kdsL, tsR, ksR, kdsR;
};

std::vector<double> count_grid_left() {
  std::vector<double> g(kCountSamples);
  for (int i = 0; i < kCountSamples; ++i)
    g[i] = kHandoff0 + (kMatchPoint - kHandoff0) * i / (kCountSamples - 1.0);
  return g;
}

std::vector<double> count_grid_right() {
  std::vector<double> g(kCountSamples);
  for (int i = 0; i < kCountSamples; ++i)
    g[i] = (1.0 - kHandoff1) - (1.0 - kHandoff1 - kMatchPoint) * i / (kCountSamples - 1.0);
  return g;
}

ShotPair shoot(int n, double mu, double nu, double Lambda, double tol, bool record) {
  const LinearAngularODE ode{n, mu, nu, Lambda};
  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;

  double kr_regular;
  {
    double lg, sm;
    frobenius::indicial_roots(ode, 1, lg, sm);
    kr_regular = nu == 0 ? 0.0 : lg;
  }

  const auto e0 = frobenius::expand(ode, 0, alpha_plus, kSeriesOrder);
  const auto e1 = frobenius::expand(ode, 1, kr_regular, kSeriesOrder);

  ShotPair sp;
  static const std::vector<double> gl = count_grid_left();
  static const std::vector<double> gr = count_grid_right();
  std::span<const double> recL, recR;
  if (record) {
    recL = gl;
    recR = gr;
  }

  auto left = integrate_interior(ode, kHandoff0, kMatchPoint, e0.value(kHandoff0),
                                 e0.derivative(kHandoff0), tol, recL);
  auto right = integrate_interior(ode, 1.0 - kHandoff1, kMatchPoint, e1.value(kHandoff1),
                                  -e1.derivative(kHandoff1), tol, recR);

  sp.kL = left.k;
  sp.kdL = left.kdot;
  sp.kR = right.k;
  sp.kdR = right.kdot;
  const double scaleL = std::abs(sp.kL) + std::abs(sp.kdL);
  const double scaleR = std::abs(sp.kR) + std::abs(sp.kdR);
  sp.w = (sp.kL * sp.kdR - sp.kdL * sp.kR) / (scaleL * scaleR);
  if (record) {
    sp.tsL = std::move(left.ts);
    sp.ksL = std::move(left.ks);
    sp.kdsL = std::move(left.kdots);
    sp.tsR = std::move(right.ts);
    sp.ksR = std::move(right.ks);
    sp.kdsR = std::move(right.kdots);
  }
  return sp;
}

// scale making the right shot best match the left at the matching point
double match_scale(const ShotPair& sp) {
  return (sp.kL * sp.kR + sp.kdL * sp.kdR) / (sp.kR * sp.kR + sp.kdR * sp.kdR);
}

int count_nodes(const ShotPair& sp) {
  const double beta = match_scale(sp);
  std::vector<double> vals;
  vals.reserve(sp.ksL.size() + sp.ksR.size());
  for (double v : sp.ksL) vals.push_back(v);
  for (size_t i = sp.ksR.size(); i-- > 0;) vals.push_back(beta * sp.ksR[i]);
  double vmax = 0;
  for (double v : vals) vmax = std::max(vmax, std::abs(v));
  const double floor_ = 1e-9 * vmax;
  int count = 0;
  double prev = 0;
  for (double v : vals) {
    if (std::abs(v) <= floor_) continue;
    if (prev != 0 && v * prev < 0) ++count;
    prev = v;
  }
  return count;
}

struct SpectrumHit {
  double lambda;
  int nodes;
  double mismatch;
};

// Scan the mismatch for sign changes up to lambda_max; refine each bracket.
std::vector<SpectrumHit> scan_spectrum(int n, double mu, int m, double lambda_max,
                                       double tol) {
  const double nu = static_cast<double>(m) * (m + n - 3);
  const double scan_tol = std::max(tol, 1e-9);
  std::vector<SpectrumHit> hits;
  double lam = 1e-8;
  double w_prev = shoot(n, mu, nu, lam, scan_tol, false).w;
  while (lam < lambda_max) {
    const double lam_next = std::min(lambda_max, lam + std::max(0.5, 0.04 * lam));
    const double w_next = shoot(n, mu, nu, lam_next, scan_tol, false).w;
    if (w_prev == 0.0 || w_prev * w_next < 0) {
      auto f = [&](double L) { return shoot(n, mu, nu, L, scan_tol, false).w; };
      std::uintmax_t iters = 80;
      auto r = boost::math::tools::toms748_solve(
          f, lam, lam_next, w_prev, w_next,
          [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(b)); },
          iters);
      double root = 0.5 * (r.first + r.second);
      // polish once at the requested tolerance
      auto fine = [&](double L) { return shoot(n, mu, nu, L, tol, false).w; };
      const double h = std::max(1e-11, 1e-9 * root);
      const double f0 = fine(root);
      const double f1 = fine(root + h);
      if (f1 != f0) {
        const double newton = root - f0 * h / (f1 - f0);
        if (newton > lam && newton < lam_next) root = newton;
      }
      auto sp = shoot(n, mu, nu, root, tol, true);
      hits.push_back({root, count_nodes(sp), std::abs(sp.w)});
    }
    lam = lam_next;
    w_prev = w_next;
  }
  std::sort(hits.begin(), hits.end(),
            [](const SpectrumHit& a, const SpectrumHit& b) { return a.lambda < b.lambda; });
  return hits;
}

void validate_nm(int n, double mu, int m) {
  if (n < 2) throw std::invalid_argument("spectra: n must be >= 2");
  if (!(mu < 0.25)) throw std::domain_error("spectra: mu must be < 1/4");
  if (m < 0) throw std::invalid_argument("spectra: m must be >= 0");
  if (n == 2 && m > 0)
    throw std::invalid_argument("spectra: n = 2 carries a single series, m must be 0");
}

AngularProfile assemble_profile(int n, double mu, int m, double Lambda, double tol) {
  const double nu = static_cast<double>(m) * (m + n - 3);
  const LinearAngularODE ode{n, mu, nu, Lambda};
  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;
  const double alpha_minus = 0.5 - disc;
  double kr_regular;
  {
    double lg, sm;
    frobenius::indicial_roots(ode, 1, lg, sm);
    kr_regular = nu == 0 ? 0.0 : lg;
  }

  AngularProfile prof;
  prof.kind = AngularProfile::Kind::linear;
  prof.n = n;
  prof.mu = mu;
  prof.nu = nu;
  prof.Lambda = Lambda;
  prof.prefactor = alpha_plus;
  prof.normalization = "phi(t)/t^{alpha_+} -> 1 as t -> 0";

  const auto e0 = frobenius::expand(ode, 0, alpha_plus, kSeriesOrder);
  const auto e1 = frobenius::expand(ode, 1, kr_regular, kSeriesOrder);

  const auto grid = detail::graded_grid(kHandoff0, 1.0 - kHandoff1, kProfileNodes,
                                        detail::Grading::cubic);
  std::vector<double> left_nodes, right_nodes_desc;
  for (double t : grid) {
    if (t <= kMatchPoint)
      left_nodes.push_back(t);
    else
      right_nodes_desc.push_back(t);
  }
  std::reverse(right_nodes_desc.begin(), right_nodes_desc.end());

  auto left = integrate_interior(ode, kHandoff0, kMatchPoint, e0.value(kHandoff0),
                                 e0.derivative(kHandoff0), tol, left_nodes);
  auto right = integrate_interior(ode, 1.0 - kHandoff1, kMatchPoint, e1.value(kHandoff1),
                                  -e1.derivative(kHandoff1), tol, right_nodes_desc);

  ShotPair sp;
  sp.kL = left.k;
  sp.kdL = left.kdot;
  sp.kR = right.k;
  sp.kdR = right.kdot;
  const double beta = match_scale(sp);

  std::vector<double> ts = left.ts, ks = left.ks, kds = left.kdots;
  for (size_t i = right.ts.size(); i-- > 0;) {
    ts.push_back(right.ts[i]);
    ks.push_back(beta * right.ks[i]);
    kds.push_back(beta * right.kdots[i]);
  }
  detail::fill_profile_storage(prof, ts, ks, kds);

  prof.basis0_minus = detail::expand_or_truncate(ode, 0, alpha_minus, kSeriesOrder);
  prof.basis0_plus = e0;
  prof.have_bases0 = true;
  const auto fit = detail::fit_origin(prof, prof.basis0_minus, prof.basis0_plus, 1e-6);
  prof.A = fit.A;
  prof.B = fit.B;

  prof.expansion1 = e1;
  prof.have_expansion1 = true;
  prof.C1 = beta;
  prof.switch0 = std::max(
      2.0 * kHandoff0,
      std::min(0.08, 0.8 * std::min(prof.basis0_minus.radius, prof.basis0_plus.radius)));
  prof.switch1 = 1.0 - std::min(0.08, 0.8 * prof.expansion1.radius);
  return prof;
}

}  // namespace

std::vector<double> eigenvalues_up_to(int n, double mu, int m, double lambda_max,
                                      double tol) {
  validate_nm(n, mu, m);
  if (!(lambda_max > 0)) return {};
  std::vector<double> out;
  for (const auto& h : scan_spectrum(n, mu, m, lambda_max, tol)) out.push_back(h.lambda);
  return out;
}

EigenResult eigenvalue(int n, double mu, int s, int m, double tol) {
  validate_nm(n, mu, m);
  if (s < 1) throw std::invalid_argument("eigenvalue: s must be >= 1");

  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;
  const double nu = static_cast<double>(m) * (m + n - 3);
  // rough scale of the s-th eigenvalue used to size the search window
  const double g0 = alpha_plus + 2.0 * (s - 1) + m;
  double lambda_max = std::max(20.0, 4.0 * g0 * (g0 + n - 2) + 8.0 * nu + 20.0);

  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto hits = scan_spectrum(n, mu, m, lambda_max, tol);
    for (const auto& h : hits) {
      if (h.nodes == s - 1) {
        EigenResult r;
        r.s = s;
        r.m = m;
        r.Lambda_sm = h.lambda;
        r.mismatch = h.mismatch;
        r.node_count = h.nodes;
        const auto idx = angular_indices(n, mu, m, h.lambda);
        r.gamma_plus = idx.gamma_plus;
        r.gamma_minus = idx.gamma_minus;
        r.profile = assemble_profile(n, mu, m, h.lambda, tol);
        return r;
      }
    }
    if (!hits.empty() && hits.back().nodes > s - 1 &&
        std::none_of(hits.begin(), hits.end(),
                     [&](const SpectrumHit& h) { return h.nodes == s - 1; }))
      throw BracketNotFound("eigenvalue: oscillation count " + std::to_string(s - 1) +
                            " not realized among mismatch roots");
    lambda_max *= 4.0;
    if (lambda_max > 1e6)
      throw BracketNotFound("eigenvalue: search interval cap reached for s=" +
                            std::to_string(s) + ", m=" + std::to_string(m));
  }
  throw BracketNotFound("eigenvalue: retries exhausted");
}

const char* to_string(HarmonicKind k) {
  switch (k) {
    case HarmonicKind::h_plus: return "h_plus";
    case HarmonicKind::h_minus: return "h_minus";
    case HarmonicKind::H_plus: return "H_plus";
    case HarmonicKind::H_minus: return "H_minus";
    case HarmonicKind::H_gamma: return "H_gamma";
  }
  return "?";
}

HarmonicKind harmonic_kind_from_string(const std::string& s) {
  if (s == "h_plus" || s == "h+") return HarmonicKind::h_plus;
  if (s == "h_minus" || s == "h-") return HarmonicKind::h_minus;
  if (s == "H_plus" || s == "H+") return HarmonicKind::H_plus;
  if (s == "H_minus" || s == "H-") return HarmonicKind::H_minus;
  if (s == "H_gamma" || s == "Hgamma") return HarmonicKind::H_gamma;
  throw std::invalid_argument("unknown harmonic kind: " + s);
}

double SeparableHarmonic::angular_value(double t) const {
  if (closed_form) return std::pow(t, closed_exponent);
  return angular.value(t);
}

double SeparableHarmonic::value(double r, double t) const {
  return std::pow(r, gamma) * angular_value(t);
}

double SeparableHarmonic::value_cartesian(std::span<const double> x) const {
  if (x.size() != static_cast<size_t>(n))
    throw std::invalid_argument("SeparableHarmonic: point dimension mismatch");
  if (!(x[0] > 0)) throw std::domain_error("SeparableHarmonic: x1 must be positive");
  double r2 = 0;
  for (double xi : x) r2 += xi * xi;
  const double r = std::sqrt(r2);
  return value(r, x[0] / r);
}

SeparableHarmonic harmonic(HarmonicKind kind, int n, double mu, const HarmonicExtra& extra) {
  if (n < 2) throw std::invalid_argument("harmonic: n must be >= 2");
  if (!(mu < 0.25)) throw std::domain_error("harmonic: mu must be < 1/4");
  const double disc = std::sqrt(0.25 - mu);
  const double alpha_plus = 0.5 + disc;
  const double alpha_minus = 0.5 - disc;

  SeparableHarmonic h;
  h.kind = kind;
  h.n = n;
  h.mu = mu;

  if (kind == HarmonicKind::h_plus || kind == HarmonicKind::h_minus) {
    const int s = extra.s.value_or(1);
    const int m = extra.m.value_or(0);
    validate_nm(n, mu, m);
    h.m = m;
    h.azimuthal = m == 0 ? "1" : "p_m(eta) (unit normalization)";
    if (s == 1 && m == 0) {
      h.closed_form = true;
      h.closed_exponent = alpha_plus;
      h.gamma = kind == HarmonicKind::h_plus ? alpha_plus : -(alpha_plus + n - 2);
      h.positive = true;
      h.note = kind == HarmonicKind::h_plus
                   ? "x1^{alpha_+}"
                   : "x1^{alpha_+} |x|^{-(n-2+2 alpha_+)}";
      return h;
    }
    auto eig = eigenvalue(n, mu, s, m);
    h.gamma = kind == HarmonicKind::h_plus ? eig.gamma_plus : eig.gamma_minus;
    h.angular = std::move(eig.profile);
    h.positive = false;  // (s,m) != (1,0) changes sign
    h.note = "r^{gamma_pm(s,m)} phi_{s,m}";
    return h;
  }

  // k_gamma based kinds
  if (!extra.gamma) throw std::invalid_argument("harmonic: gamma required for this kind");
  const double gamma = *extra.gamma;
  const int m = extra.m.value_or(0);
  validate_nm(n, mu, m);
  h.m = m;
  h.azimuthal = m == 0 ? "1" : "p_m(eta) (unit normalization)";

  if (kind == HarmonicKind::H_gamma) {
    if (!(gamma > -(alpha_plus + n - 2) && gamma < alpha_plus))
      throw GammaOutOfRange("harmonic: gamma outside the positivity interval");
    if (m != 0) throw std::invalid_argument("harmonic: H_gamma requires m = 0");
  }
  const double Lambda = gamma * (gamma + n - 2);
  const double radial =
      kind == HarmonicKind::H_minus ? -(gamma + n - 2) : gamma;
  h.gamma = radial;

  const double refl = -(alpha_minus + n - 2);
  if (m == 0 && (std::abs(gamma - alpha_minus) < 1e-13 || std::abs(gamma - refl) < 1e-13)) {
    h.closed_form = true;
    h.closed_exponent = alpha_minus;
    h.positive = true;
    h.note = "k_gamma(t) = t^{alpha_-} exactly";
    return h;
  }

  h.angular = solve_k_gamma(n, mu, m, gamma);
  h.positive = m == 0 && Lambda < alpha_plus * (alpha_plus + n - 2);
  h.note = "continued regular branch from t=1";
  return h;
}

GrowthBoundReport verify_growth_bounds(const SeparableHarmonic& h, double gamma, int n_r,
                                       int n_theta) {
  GrowthBoundReport rep;
  rep.r_min = 1e-3;
  rep.r_max = 1e3;
  rep.n_r = n_r;
  rep.n_theta = n_theta;
  const double disc = std::sqrt(0.25 - h.mu);
  const double alpha_minus = 0.5 - disc;

  std::vector<double> tgrid(n_theta);
  const double t_lo = kHandoff0, t_hi = 1.0 - kHandoff0;
  for (int j = 0; j < n_theta; ++j)
    tgrid[j] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(j) / (n_theta - 1));

  double sup = -kInf, inf = kInf;
  for (int i = 0; i < n_r; ++i) {
    const double r = rep.r_min * std::pow(rep.r_max / rep.r_min,
                                          static_cast<double>(i) / (n_r - 1));
    for (int j = 0; j < n_theta; ++j) {
      const double t = tgrid[j];
      const double envelope = std::pow(r * t, alpha_minus) * std::pow(r, gamma - alpha_minus);
      const double ratio = h.value(r, t) / envelope;
      if (ratio > sup) {
        sup = ratio;
        rep.worst_r = r;
        rep.worst_t = t;
      }
      inf = std::min(inf, ratio);
    }
  }
  rep.sup_ratio = sup;
  rep.inf_ratio = inf;

  // the ratio is r-independent for exact separable data; trend in t decides
  // whether the envelope holds as t -> 0
  const double rho0 = h.value(1.0, tgrid[0]) / std::pow(tgrid[0], alpha_minus);
  const double rho1 = h.value(1.0, tgrid[1]) / std::pow(tgrid[1], alpha_minus);
  rep.slope_low_t = std::log(std::abs(rho1 / rho0)) / std::log(tgrid[1] / tgrid[0]);

  const bool finite_positive = inf > 0 && std::isfinite(sup);
  const bool flat = std::abs(rep.slope_low_t) < 0.02;
  rep.pass = finite_positive && flat;
  rep.c_best = rep.pass ? std::max(sup, 1.0 / inf) : kInf;
  return rep;
}

}  // namespace hsh::spectra
