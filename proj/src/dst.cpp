#include "hqm/dst.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hqm/errors.hpp"
#include "hqm/parallel.hpp"

namespace hqm {

namespace {

// DST-I matrix S_{jk} = sin(pi j k / (M+1)), j,k = 1..M, stored dense.
// S*S = (M+1)/2 * Id, so the inverse transform is S scaled by 2/(M+1).
const std::vector<double>& sine_matrix(int M) {
  static std::map<int, std::vector<double>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(M);
  if (it != cache.end()) return it->second;
  std::vector<double> S(static_cast<size_t>(M) * M);
  const double f = M_PI / (M + 1);
  for (int j = 1; j <= M; ++j)
    for (int k = 1; k <= M; ++k)
      S[(j - 1) * static_cast<size_t>(M) + (k - 1)] = std::sin(f * j * k);
  return cache.emplace(M, std::move(S)).first->second;
}

// Apply the DST-I along `axis` to the interior samples of `f` in place.
// Interior means indices 1..res-2 on every axis; everything else is left
// untouched (the caller zeroes the boundary).
void dst_axis(ScalarField& f, int axis) {
  const Grid& g = f.grid();
  const int n = g.res(axis);
  const int M = n - 2;
  const auto& S = sine_matrix(M);

  int64_t stride = 1;
  for (int a = axis + 1; a < g.dim(); ++a) stride *= g.res(a);
  const int64_t lines = g.size() / n;

  auto& v = f.data();
  parallel_for(lines, [&](int64_t lb, int64_t le) {
    std::vector<Cx> in(M), out(M);
    for (int64_t line = lb; line < le; ++line) {
      const int64_t block = line / stride;
      const int64_t inner = line % stride;
      const int64_t base = block * stride * n + inner;
      for (int i = 0; i < M; ++i) in[i] = v[base + (i + 1) * stride];
      for (int j = 0; j < M; ++j) {
        Cx acc{0, 0};
        const double* row = &S[static_cast<size_t>(j) * M];
        for (int k = 0; k < M; ++k) acc += row[k] * in[k];
        out[j] = acc;
      }
      for (int i = 0; i < M; ++i) v[base + (i + 1) * stride] = out[i];
    }
  });
}

}  // namespace

ScalarField green_dirichlet(const ScalarField& source) {
  const Grid& g = source.grid();
  require(!g.periodic(), ErrorKind::UnsupportedDomain,
          "Dirichlet Green operator requires a box grid");
  require(source.finite(), ErrorKind::Precondition, "source has non-finite entries");

  ScalarField u = source;
  for (int a = 0; a < g.dim(); ++a) dst_axis(u, a);

  // Divide by the analytic Dirichlet eigenvalues and the inverse-transform
  // normalization in one pass.
  double norm = 1.0;
  for (int a = 0; a < g.dim(); ++a) norm *= 2.0 / (g.res(a) - 1);
  parallel_for(u.size(), [&](int64_t b, int64_t e) {
    std::vector<int> idx;
    for (int64_t k = b; k < e; ++k) {
      idx = g.unindex(k);
      bool interior = true;
      double lambda = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        if (idx[a] == 0 || idx[a] == g.res(a) - 1) { interior = false; break; }
        const double L = g.hi(a) - g.lo(a);
        lambda += sq(M_PI * idx[a] / L);
      }
      u[k] = interior ? u[k] * (-norm / lambda) : Cx{0, 0};
    }
  });

  for (int a = 0; a < g.dim(); ++a) dst_axis(u, a);
  return u;
}

}  // namespace hqm
