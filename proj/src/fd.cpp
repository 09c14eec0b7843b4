#include "hqm/fd.hpp"

#include <cmath>
#include <mutex>

#include "hqm/errors.hpp"
#include "hqm/parallel.hpp"

namespace hqm {

std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(x.size()) - 1;
  require(n >= m, ErrorKind::InvalidGrid, "stencil too short for derivative");
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

// Stencil table for one axis: per sample position, the node offsets and
// weights of an order-4 approximation. Interior rows share the centered
// stencil; the first/last two rows are one-sided on non-periodic axes.
struct AxisStencil {
  std::vector<std::vector<int>> offs;
  std::vector<std::vector<double>> w;
};

AxisStencil make_axis_stencil(int n, double h, bool periodic, int order) {
  const int c_width = 5;                       // centered, 4th order
  const int s_width = (order == 1) ? 5 : 6;    // one-sided, 4th order
  require(n >= s_width, ErrorKind::InvalidGrid,
          "grid resolution below stencil width");
  AxisStencil s;
  s.offs.resize(n);
  s.w.resize(n);

  auto nodes = [h](int from, int count) {
    std::vector<double> x(count);
    for (int i = 0; i < count; ++i) x[i] = (from + i) * h;
    return x;
  };

  const std::vector<double> wc = fd_weights(0.0, nodes(-2, c_width), order);
  for (int i = 0; i < n; ++i) {
    const bool interior = periodic || (i >= 2 && i <= n - 3);
    if (interior) {
      s.offs[i] = {-2, -1, 0, 1, 2};
      s.w[i] = wc;
    } else {
      const int from = (i < 2) ? -i : n - 1 - i - (s_width - 1);
      s.offs[i].resize(s_width);
      for (int q = 0; q < s_width; ++q) s.offs[i][q] = from + q;
      s.w[i] = fd_weights(0.0, nodes(from, s_width), order);
    }
  }
  return s;
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis, int order) {
  const Grid& g = f.grid();
  require(f.finite(), ErrorKind::Precondition, "field has non-finite entries");
  const int n = g.res(axis);
  const AxisStencil st = make_axis_stencil(n, g.spacing(axis), g.periodic(), order);

  // Stride of the axis in the row-major layout and number of 1d lines.
  int64_t stride = 1;
  for (int a = axis + 1; a < g.dim(); ++a) stride *= g.res(a);
  const int64_t lines = g.size() / n;

  ScalarField out(g);
  const auto& in = f.data();
  auto& ov = out.data();
  parallel_for(lines, [&](int64_t lb, int64_t le) {
    for (int64_t line = lb; line < le; ++line) {
      // Base linear index of sample i=0 on this line.
      const int64_t block = line / stride;
      const int64_t inner = line % stride;
      const int64_t base = block * stride * n + inner;
      for (int i = 0; i < n; ++i) {
        Cx acc{0.0, 0.0};
        const auto& offs = st.offs[i];
        const auto& w = st.w[i];
        for (size_t q = 0; q < offs.size(); ++q) {
          int j = i + offs[q];
          if (g.periodic()) j = (j % n + n) % n;
          acc += w[q] * in[base + static_cast<int64_t>(j) * stride];
        }
        ov[base + static_cast<int64_t>(i) * stride] = acc;
      }
    }
  });
  return out;
}

VectorField gradient(const ScalarField& f) {
  VectorField g(f.grid());
  for (int a = 0; a < f.grid().dim(); ++a) g.comp(a) = derivative(f, a, 1);
  return g;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out = derivative(f, 0, 2);
  for (int a = 1; a < f.grid().dim(); ++a) out += derivative(f, a, 2);
  return out;
}

ScalarField divergence(const VectorField& v) {
  ScalarField out = derivative(v.comp(0), 0, 1);
  for (int a = 1; a < v.dim(); ++a) out += derivative(v.comp(a), a, 1);
  return out;
}

std::vector<double> quadrature_weights_1d(int n, double h, bool periodic) {
  std::vector<double> w(n, 0.0);
  if (periodic) {
    for (double& x : w) x = h;
    return w;
  }
  const int intervals = n - 1;
  require(intervals >= 4, ErrorKind::InvalidGrid, "too few samples for quadrature");
  int simpson_intervals = intervals;
  bool tail38 = false;
  if (intervals % 2 != 0) {
    simpson_intervals = intervals - 3;  // 3/8 rule on the last three
    tail38 = true;
  }
  for (int i = 0; i + 2 <= simpson_intervals; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (tail38) {
    const int b = simpson_intervals;
    w[b] += 3.0 * h / 8.0;
    w[b + 1] += 9.0 * h / 8.0;
    w[b + 2] += 9.0 * h / 8.0;
    w[b + 3] += 3.0 * h / 8.0;
  }
  return w;
}

Cx integrate(const ScalarField& f) {
  const Grid& g = f.grid();
  require(f.finite(), ErrorKind::Precondition, "field has non-finite entries");
  std::vector<std::vector<double>> w(g.dim());
  for (int a = 0; a < g.dim(); ++a)
    w[a] = quadrature_weights_1d(g.res(a), g.spacing(a), g.periodic());

  std::mutex sum_mutex;
  Cx total{0, 0};
  parallel_for(g.size(), [&](int64_t b, int64_t e) {
    Cx acc{0, 0};
    std::vector<int> idx;
    for (int64_t k = b; k < e; ++k) {
      idx = g.unindex(k);
      double weight = 1.0;
      for (int a = 0; a < g.dim(); ++a) weight *= w[a][idx[a]];
      acc += weight * f[k];
    }
    std::lock_guard<std::mutex> lock(sum_mutex);
    total += acc;
  });
  return total;
}

Cx integrate_uniform(const ScalarField& f) {
  const Grid& g = f.grid();
  require(f.finite(), ErrorKind::Precondition, "field has non-finite entries");
  double cell = 1.0;
  for (int a = 0; a < g.dim(); ++a) cell *= g.spacing(a);
  std::mutex sum_mutex;
  Cx total{0, 0};
  parallel_for(g.size(), [&](int64_t b, int64_t e) {
    Cx acc{0, 0};
    for (int64_t k = b; k < e; ++k) acc += f[k];
    std::lock_guard<std::mutex> lock(sum_mutex);
    total += acc;
  });
  return total * cell;
}

double norm_l2(const ScalarField& f) {
  ScalarField sq(f.grid());
  for (int64_t k = 0; k < f.size(); ++k) sq[k] = std::norm(f[k]);
  return std::sqrt(std::abs(integrate(sq).real()));
}

double norm_h1(const ScalarField& f) {
  double acc = sq(norm_l2(f));
  for (int a = 0; a < f.grid().dim(); ++a) acc += sq(norm_l2(derivative(f, a, 1)));
  return std::sqrt(acc);
}

}  // namespace hqm
