#include "hqm/qls.hpp"

#include <cmath>

#include "hqm/dst.hpp"
#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/linalg.hpp"
#include "hqm/parallel.hpp"
#include "hqm/plants.hpp"

namespace hqm {

void CoupledTensors::validate() const {
  for (int J = 1; J <= 2; ++J) {
    for (int K = 1; K <= 2; ++K) {
      const Tensor3Field& T = at(J, K);
      require(grid().periodic() || vanishes_on_collar(T, 1, 0.0),
              ErrorKind::Precondition,
              "A tensors must be compactly supported in the grid interior");
      if (J != K) continue;
      const double tol = 1e-12 * std::max(1.0, T.max_abs());
      for (int j = 0; j < T.dim(); ++j)
        for (int k = 0; k < T.dim(); ++k)
          for (int l = k + 1; l < T.dim(); ++l) {
            const ScalarField& x = T.comp(j, k, l);
            const ScalarField& y = T.comp(j, l, k);
            for (int64_t q = 0; q < x.size(); ++q)
              require(std::abs(x[q] - y[q]) <= tol, ErrorKind::Precondition,
                      "diagonal blocks must be symmetric in the last two indices");
          }
    }
  }
}

namespace {

// First-index-contracted vector V^{JK}_j = A_jkl d_k u^J d_l u^K.
VectorField contracted_vector(const Tensor3Field& A, const VectorField& gJ,
                              const VectorField& gK) {
  const Grid& g = A.grid();
  const int d = g.dim();
  VectorField V(g);
  parallel_for(g.size(), [&](int64_t lo, int64_t hi) {
    for (int64_t q = lo; q < hi; ++q)
      for (int j = 0; j < d; ++j) {
        Cx acc{0, 0};
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            acc += A.comp(j, k, l)[q] * gJ.comp(k)[q] * gK.comp(l)[q];
        V.comp(j)[q] = acc;
      }
  });
  return V;
}

// Nonlinear term N^J(u) = sum_K div( A^{JK} : grad u^J (x) grad u^K ).
std::array<ScalarField, 2> nonlinearity(const CoupledTensors& A,
                                        const ScalarField& u1, const ScalarField& u2) {
  const Grid& g = A.grid();
  const VectorField g1 = gradient(u1);
  const VectorField g2 = gradient(u2);
  std::array<ScalarField, 2> N{ScalarField(g), ScalarField(g)};
  const VectorField* grads[2] = {&g1, &g2};
  for (int J = 1; J <= 2; ++J) {
    ScalarField acc(g);
    for (int K = 1; K <= 2; ++K) {
      VectorField V = contracted_vector(A.at(J, K), *grads[J - 1], *grads[K - 1]);
      acc += divergence(V);
    }
    N[J - 1] = std::move(acc);
  }
  return N;
}

double h1_diff(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a;
  d -= b;
  return norm_h1(d);
}

}  // namespace

ForwardSolution solve_forward(const CoupledTensors& A, const BoundaryData& data,
                              double epsilon, double tol, int max_iter) {
  A.validate();
  const Grid& g = A.grid();
  require(!g.periodic(), ErrorKind::Precondition, "forward solve needs a box grid");
  ScalarField v01 = sample(data.f1, g);
  ScalarField v02 = sample(data.f2, g);
  v01 *= Cx{epsilon, 0};
  v02 *= Cx{epsilon, 0};

  ForwardSolution sol(g);
  sol.epsilon = epsilon;
  sol.u1 = v01;
  sol.u2 = v02;

  int grow_streak = 0;
  for (int it = 0; it < max_iter; ++it) {
    const auto N = nonlinearity(A, sol.u1, sol.u2);
    ScalarField next1 = v01;
    next1 -= green_dirichlet(N[0]);
    ScalarField next2 = v02;
    next2 -= green_dirichlet(N[1]);

    const double res = std::max(h1_diff(next1, sol.u1), h1_diff(next2, sol.u2));
    if (!sol.residual_history.empty() && res > sol.residual_history.back()) {
      if (++grow_streak >= 3)
        throw Error(ErrorKind::SmallnessViolated,
                    "fixed-point iteration diverges (ratio " +
                        std::to_string(res / sol.residual_history.back()) +
                        "); reduce the data amplitude");
    } else {
      grow_streak = 0;
    }
    sol.residual_history.push_back(res);
    sol.u1 = std::move(next1);
    sol.u2 = std::move(next2);
    if (res < tol) {
      const size_t n = sol.residual_history.size();
      if (n >= 3)
        sol.contraction_ratio =
            sol.residual_history[n - 2] / std::max(sol.residual_history[n - 3], 1e-300);
      return sol;
    }
  }
  throw Error(ErrorKind::Resolution,
              "fixed-point tolerance unreachable within the iteration budget");
}

std::array<Cx, 2> dtn_pair(const CoupledTensors& A, const BoundaryData& data,
                           double epsilon, const HarmonicFn& w) {
  const Grid& g = A.grid();
  ForwardSolution sol = solve_forward(A, data, epsilon, 1e-12, 80);
  const VectorField gw = sample_gradient(w, g);
  const VectorField g1 = gradient(sol.u1);
  const VectorField g2 = gradient(sol.u2);
  const VectorField* grads[2] = {&g1, &g2};

  std::array<Cx, 2> pairing;
  for (int J = 1; J <= 2; ++J) {
    // int grad u^J . grad w over the box (smooth, not compactly supported).
    ScalarField dot(g);
    for (int a = 0; a < g.dim(); ++a) {
      ScalarField t = grads[J - 1]->comp(a);
      for (int64_t q = 0; q < t.size(); ++q) t[q] *= gw.comp(a)[q];
      dot += t;
    }
    Cx val = integrate(dot);
    // + sum_K int (A^{JK} : grad u^J (x) grad u^K) . grad w, compactly
    // supported, uniform rule. The sign follows the fixed-point dynamics
    // u = eps v0 - G0(div V): at the fixed point Lap u = -div V, so the
    // flux pairing picks up +V.grad w.
    for (int K = 1; K <= 2; ++K) {
      VectorField V = contracted_vector(A.at(J, K), *grads[J - 1], *grads[K - 1]);
      ScalarField t(g);
      for (int a = 0; a < g.dim(); ++a) {
        ScalarField s = V.comp(a);
        for (int64_t q = 0; q < s.size(); ++q) s[q] *= gw.comp(a)[q];
        t += s;
      }
      val += integrate_uniform(t);
    }
    pairing[J - 1] = val;
  }
  return pairing;
}

std::array<ScalarField, 2> second_corrector(const CoupledTensors& A,
                                            const BoundaryData& data) {
  const Grid& g = A.grid();
  ScalarField v01 = sample(data.f1, g);
  ScalarField v02 = sample(data.f2, g);
  const auto N = nonlinearity(A, v01, v02);
  std::array<ScalarField, 2> v1{ScalarField(g), ScalarField(g)};
  v1[0] = green_dirichlet(N[0]);
  v1[0] *= Cx{-1, 0};
  v1[1] = green_dirichlet(N[1]);
  v1[1] *= Cx{-1, 0};
  return v1;
}

SecondLinearization second_linearization(const CoupledTensors& A,
                                         const BoundaryData& data, const HarmonicFn& w,
                                         const std::vector<double>& eps_list,
                                         double tol) {
  require(eps_list.size() >= 3, ErrorKind::Precondition,
          "need at least 3 epsilon values");
  double emax = 0.0, emin = 1e300;
  for (double e : eps_list) {
    emax = std::max(emax, e);
    emin = std::min(emin, e);
  }
  require(emax / emin >= 1.5, ErrorKind::Conditioning,
          "epsilon sweep too narrow for a stable fit; widen the range");
  (void)tol;

  std::vector<std::array<Cx, 2>> vals;
  for (double eps : eps_list) vals.push_back(dtn_pair(A, data, eps, w));

  auto fit = [&](int J, size_t drop) {
    std::vector<Cx> M, rhs;
    for (size_t i = 0; i < eps_list.size(); ++i) {
      if (i == drop) continue;
      const double e = eps_list[i];
      M.push_back(Cx{e, 0});
      M.push_back(Cx{e * e, 0});
      M.push_back(Cx{e * e * e, 0});
      rhs.push_back(vals[i][J - 1]);
    }
    const int m = static_cast<int>(rhs.size());
    return least_squares(M, rhs, m, 3);
  };

  // Index of the largest epsilon (dropped for the Richardson-style bar).
  size_t imax = 0;
  for (size_t i = 0; i < eps_list.size(); ++i)
    if (eps_list[i] > eps_list[imax]) imax = i;

  SecondLinearization out;
  for (int J = 1; J <= 2; ++J) {
    const auto full = fit(J, eps_list.size());
    out.c1[J - 1] = full[0];
    out.c2[J - 1] = full[1];
    if (eps_list.size() >= 4) {
      const auto dropped = fit(J, imax);
      out.error_estimate[J - 1] = std::abs(full[1] - dropped[1]);
    } else {
      out.error_estimate[J - 1] = std::abs(full[1]) * 1e-2;
    }
  }
  return out;
}

std::array<Cx, 2> moment_oracle(const CoupledTensors& A, const BoundaryData& data,
                                const HarmonicFn& w) {
  const Grid& g = A.grid();
  const VectorField gw = sample_gradient(w, g);
  const VectorField g1 = sample_gradient(data.f1, g);
  const VectorField g2 = sample_gradient(data.f2, g);
  const VectorField* grads[2] = {&g1, &g2};
  std::array<Cx, 2> out;
  for (int J = 1; J <= 2; ++J) {
    Cx acc{0, 0};
    for (int K = 1; K <= 2; ++K) {
      ScalarField t(g);
      const int d = g.dim();
      const Tensor3Field& T = A.at(J, K);
      parallel_for(g.size(), [&](int64_t lo, int64_t hi) {
        for (int64_t q = lo; q < hi; ++q) {
          Cx s{0, 0};
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
              for (int l = 0; l < d; ++l)
                s += T.comp(j, k, l)[q] * gw.comp(j)[q] *
                     grads[J - 1]->comp(k)[q] * grads[K - 1]->comp(l)[q];
          t[q] = s;
        }
      });
      acc += integrate_uniform(t);
    }
    out[J - 1] = acc;
  }
  return out;
}

CoupledTensors planted_coupled_tensors(const Grid& g, double amp) {
  CoupledTensors A(g);
  AnalyticScalar bump = box_bump(g, 0.65);
  ScalarField s = sample_scalar(g, bump);
  s *= Cx{amp, 0};
  for (int k = 0; k < g.dim(); ++k) {
    A.at(1, 1).comp(0, k, k) += s;
    ScalarField half = s;
    half *= Cx{0.5, 0};
    A.at(1, 1).comp(k, 0, k) += half;
    A.at(1, 1).comp(k, k, 0) += half;
  }
  A.at(2, 2).comp(1, 2, 2) += s;
  A.at(1, 2).comp(0, 1, 2) += s;
  A.at(1, 2).comp(2, 0, 0) += s;
  A.at(2, 1).comp(1, 1, 0) += s;
  return A;
}

UniquenessResult uniqueness_experiment(
    const CoupledTensors& A, const CoupledTensors& A_tilde,
    const std::vector<std::array<HarmonicFn, 3>>& dictionary,
    const std::vector<double>& eps_list) {
  UniquenessResult out;
  out.coverage_warning = dictionary.size() < 10;
  int index = 0;
  for (const auto& triple : dictionary) {
    const BoundaryData data{triple[1], triple[2]};
    const HarmonicFn& w = triple[0];
    const SecondLinearization sA = second_linearization(A, data, w, eps_list);
    const SecondLinearization sT = second_linearization(A_tilde, data, w, eps_list);
    double gap = 0.0;
    for (int J = 0; J < 2; ++J) {
      gap = std::max(gap, std::abs(sA.c2[J] - sT.c2[J]));
      out.fit_noise = std::max(out.fit_noise,
                               std::max(sA.error_estimate[J], sT.error_estimate[J]));
    }
    out.max_gap = std::max(out.max_gap, gap);
    out.rows.push_back({static_cast<double>(index++), gap,
                        std::abs(sA.c2[0] - sT.c2[0]), std::abs(sA.c2[1] - sT.c2[1])});
  }
  return out;
}

}  // namespace hqm
