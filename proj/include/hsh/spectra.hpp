#ifndef HSH_SPECTRA_HPP
#define HSH_SPECTRA_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsh/angular.hpp"

namespace hsh::spectra {

// Eigenpair of the weighted angular problem: s >= 1 indexes by oscillation
// count (profile has exactly s-1 interior sign changes), m is the azimuthal
// index (forced 0 when n = 2).
struct EigenResult {
  int s = 0, m = 0;
  double Lambda_sm = 0;
  double gamma_plus = 0, gamma_minus = 0;
  double mismatch = 0;    // scaled two-sided Wronskian at the matching point
  int node_count = 0;     // certified interior sign changes
  AngularProfile profile;  // t^{alpha_+} behavior at 0, regular branch at 1
};

EigenResult eigenvalue(int n, double mu, int s, int m, double tol = 1e-11);

// All eigenvalues Lambda_{s,m} below lambda_max for fixed m, ascending.
std::vector<double> eigenvalues_up_to(int n, double mu, int m, double lambda_max,
                                      double tol = 1e-11);

enum class HarmonicKind { h_plus, h_minus, H_plus, H_minus, H_gamma };

const char* to_string(HarmonicKind k);
HarmonicKind harmonic_kind_from_string(const std::string& s);

// A separable solution of the linear equation, u = r^gamma k(cos theta_1)
// times an azimuthal factor (kept symbolic, unit normalization, when m >= 1).
struct SeparableHarmonic {
  HarmonicKind kind = HarmonicKind::h_plus;
  int n = 0;
  double mu = 0;
  double gamma = 0;  // radial exponent
  int m = 0;
  bool positive = false;
  bool closed_form = false;
  double closed_exponent = 0;  // closed forms have k(t) = t^closed_exponent
  std::string azimuthal;       // "1" or "p_m(eta) (unit normalization)"
  std::string note;
  AngularProfile angular;  // only when !closed_form

  double angular_value(double t) const;
  double value(double r, double t) const;
  double value_cartesian(std::span<const double> x) const;
};

struct HarmonicExtra {
  std::optional<double> gamma;
  std::optional<int> s;
  std::optional<int> m;
};

// Construction per kind:
//   h_plus / h_minus : eigenfunction harmonics r^{gamma_pm(s,m)} phi_{s,m};
//                      default (s,m) = (1,0) gives the closed forms
//                      x1^{alpha_+} and x1^{alpha_+} |x|^{-(n-2+2 alpha_+)}.
//   H_plus / H_minus : r^gamma k_gamma and r^{-(gamma+n-2)} k_gamma
//                      (gamma = alpha_- and its reflection are closed forms).
//   H_gamma          : H_plus restricted to the positivity range
//                      gamma in (-(alpha_+ + n - 2), alpha_+).
SeparableHarmonic harmonic(HarmonicKind kind, int n, double mu,
                           const HarmonicExtra& extra = {});

// Two-sided envelope check of h against x1^{alpha_-} |x|^{gamma - alpha_-}.
struct GrowthBoundReport {
  double c_best = 0;
  bool pass = false;
  double sup_ratio = 0, inf_ratio = 0;
  double slope_low_t = 0;  // log-log trend of the ratio at the smallest t
  double r_min = 0, r_max = 0;
  int n_r = 0, n_theta = 0;
  double worst_r = 0, worst_t = 0;
};

GrowthBoundReport verify_growth_bounds(const SeparableHarmonic& h, double gamma,
                                       int n_r = 60, int n_theta = 60);

}  // namespace hsh::spectra

#endif
