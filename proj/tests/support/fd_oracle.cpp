#include "support/fd_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace hsh_tests {

std::vector<double> fd_eigenvalues(int n, double mu, int m, int k, int points) {
  if (points < 50) throw std::invalid_argument("fd_eigenvalues: grid too coarse");
  const int M = points;
  const double nu = static_cast<double>(m) * (m + n - 3);

  // rational grading clustered at both endpoints
  auto map = [](double u) {
    const double a = std::pow(u, 4.0);
    const double b = std::pow(1.0 - u, 4.0);
    return a / (a + b);
  };
  std::vector<double> t(M + 1);
  for (int j = 0; j <= M; ++j) t[j] = map(static_cast<double>(j) / M);

  auto sigma = [&](double x) { return std::pow(1.0 - x * x, 0.5 * (n - 1)); };
  auto weight = [&](double x) { return std::pow(1.0 - x * x, 0.5 * (n - 3)); };

  // unknowns j = 1..J; Dirichlet at the left cut always, Dirichlet at the
  // right cut when nu > 0, zero flux at the last face when nu = 0
  const bool dirichlet_right = nu > 0;
  const int J = M - 1;
  Eigen::VectorXd diag(J), sub(J - 1);
  std::vector<double> dscale(J);

  for (int j = 1; j <= J; ++j) {
    const double hl = t[j] - t[j - 1];
    const double hr = t[j + 1] - t[j];
    const double hhat = 0.5 * (t[j + 1] - t[j - 1]);
    const double sl = sigma(0.5 * (t[j - 1] + t[j])) / hl;
    double sr = sigma(0.5 * (t[j] + t[j + 1])) / hr;
    if (j == J && !dirichlet_right) sr = 0.0;  // free boundary: no flux past the cut
    const double w = weight(t[j]);
    const double q = w * (mu / (t[j] * t[j]) - nu / (1.0 - t[j] * t[j]));
    diag(j - 1) = sl + sr - q * hhat;
    if (j < J) sub(j - 1) = -sigma(0.5 * (t[j] + t[j + 1])) / hr;
    dscale[j - 1] = w * hhat;
  }

  // symmetric reduction by the diagonal weight
  for (int j = 0; j < J; ++j) diag(j) /= dscale[j];
  for (int j = 0; j + 1 < J; ++j) sub(j) /= std::sqrt(dscale[j] * dscale[j + 1]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < k && i < J; ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

}  // namespace hsh_tests
