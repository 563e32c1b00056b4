#ifndef HSH_ERRORS_HPP
#define HSH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hsh {

// Base class for solver-side failures (CLI maps these to exit code 3).
// Input validation uses std::invalid_argument / std::domain_error (exit code 2).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResonantIndices : Error {
  double exponent;
  int step;
  ResonantIndices(double expo, int j, const std::string& msg)
      : Error(msg), exponent(expo), step(j) {}
};

struct StepSizeUnderflow : Error {
  using Error::Error;
};

struct EigenvalueCollision : Error {
  double lambda_requested;
  double lambda_eigen;
  EigenvalueCollision(double req, double eig, const std::string& msg)
      : Error(msg), lambda_requested(req), lambda_eigen(eig) {}
};

struct IllConditionedFit : Error {
  double condition_number;
  double a_coeff, b_coeff;
  IllConditionedFit(double cond, double a, double b, const std::string& msg)
      : Error(msg), condition_number(cond), a_coeff(a), b_coeff(b) {}
};

struct BracketNotFound : Error {
  using Error::Error;
};

struct NoBracket : Error {
  bool critical;  // parameter sits on the threshold itself
  NoBracket(const std::string& msg, bool crit = false) : Error(msg), critical(crit) {}
};

struct SearchExhausted : Error {
  using Error::Error;
};

struct MonotonicityViolation : Error {
  using Error::Error;
};

struct DivergentIntegral : Error {
  using Error::Error;
};

struct GammaOutOfRange : Error {
  using Error::Error;
};

struct StencilOutOfDomain : Error {
  using Error::Error;
};

}  // namespace hsh

#endif
