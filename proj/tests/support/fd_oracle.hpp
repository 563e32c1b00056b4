#ifndef HSH_TESTS_FD_ORACLE_HPP
#define HSH_TESTS_FD_ORACLE_HPP

#include <vector>

namespace hsh_tests {

// First k eigenvalues of the weighted angular problem
//   (sigma k')' + sigma/(1-t^2) (mu/t^2 - nu/(1-t^2)) k = -Lambda sigma/(1-t^2) k
// on a graded finite-difference grid, via a symmetric tridiagonal matrix
// eigensolve. Independent of the shooting implementation.
std::vector<double> fd_eigenvalues(int n, double mu, int m, int k, int points = 2000);

}  // namespace hsh_tests

#endif
