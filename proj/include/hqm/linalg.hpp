#ifndef HQM_LINALG_HPP
#define HQM_LINALG_HPP

#include <vector>

#include "hqm/types.hpp"

namespace hqm {

// Dense column-major-free helpers for the small systems that appear in
// fits and basis constructions. A is row-major m x n.

// Solve A x = b for square A by partially pivoted LU. Throws on singular A.
std::vector<Cx> solve_dense(std::vector<Cx> A, std::vector<Cx> b, int n);

// Least squares min ||A x - b||_2 via normal equations, A is m x n, m >= n.
std::vector<Cx> least_squares(const std::vector<Cx>& A, const std::vector<Cx>& b,
                              int m, int n);

// Real kernel basis of a row-major m x n matrix (tolerance-based Gaussian
// elimination). Returns vectors spanning {x : A x = 0}.
std::vector<std::vector<double>> kernel_basis(std::vector<double> A, int m, int n,
                                              double tol = 1e-10);

}  // namespace hqm

#endif
