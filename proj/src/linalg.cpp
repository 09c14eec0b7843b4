#include "hqm/linalg.hpp"

#include <cmath>

#include "hqm/errors.hpp"

namespace hqm {

std::vector<Cx> solve_dense(std::vector<Cx> A, std::vector<Cx> b, int n) {
  require(static_cast<int>(b.size()) == n, ErrorKind::Precondition, "rhs size");
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(A[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(A[r * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    require(best > 0.0, ErrorKind::Conditioning, "singular linear system");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const Cx d = A[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const Cx f = A[r * n + col] / d;
      if (f == Cx{0, 0}) continue;
      for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Cx> x(n);
  for (int r = n - 1; r >= 0; --r) {
    Cx acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * x[c];
    x[r] = acc / A[r * n + r];
  }
  return x;
}

std::vector<Cx> least_squares(const std::vector<Cx>& A, const std::vector<Cx>& b,
                              int m, int n) {
  require(m >= n, ErrorKind::Precondition, "under-determined least squares");
  // Column equilibration keeps the normal equations well scaled when the
  // basis mixes columns of wildly different magnitude.
  std::vector<double> scale(n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < n; ++c) scale[c] += std::norm(A[i * n + c]);
  for (int c = 0; c < n; ++c) {
    scale[c] = std::sqrt(scale[c]);
    require(scale[c] > 0.0, ErrorKind::Conditioning, "zero column in least squares");
  }
  std::vector<Cx> G(static_cast<size_t>(n) * n, Cx{0, 0});
  std::vector<Cx> rhs(n, Cx{0, 0});
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < n; ++r) {
      const Cx air = std::conj(A[i * n + r]) / scale[r];
      rhs[r] += air * b[i];
      for (int c = 0; c < n; ++c) G[r * n + c] += air * A[i * n + c] / scale[c];
    }
  }
  std::vector<Cx> x = solve_dense(std::move(G), std::move(rhs), n);
  for (int c = 0; c < n; ++c) x[c] /= scale[c];
  return x;
}

std::vector<std::vector<double>> kernel_basis(std::vector<double> A, int m, int n,
                                              double tol) {
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int piv = row;
    double best = std::fabs(A[row * n + col]);
    for (int r = row + 1; r < m; ++r) {
      const double v = std::fabs(A[r * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (best <= tol) continue;
    if (piv != row)
      for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[row * n + c]);
    const double d = A[row * n + col];
    for (int c = 0; c < n; ++c) A[row * n + c] /= d;
    for (int r = 0; r < m; ++r) {
      if (r == row) continue;
      const double f = A[r * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) A[r * n + c] -= f * A[row * n + c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<double>> basis;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<double> v(n, 0.0);
    v[free] = 1.0;
    for (size_t r = 0; r < pivot_col.size(); ++r)
      v[pivot_col[r]] = -A[r * n + free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace hqm
