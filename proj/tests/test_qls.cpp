#include <cmath>

#include "doctest.h"
#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/plants.hpp"
#include "hqm/qls.hpp"
#include "hqm/rng.hpp"

using namespace hqm;

namespace {

CoupledTensors planted_tensors(const Grid& g, double amp = 1.0) {
  return planted_coupled_tensors(g, amp);
}

BoundaryData poly_data() {
  // Harmonic polynomials of degree <= 2 keep every FD stencil exact.
  BoundaryData d;
  d.f1 = parse_harmonic("kind=poly;dim=3;degree=2;index=1");
  d.f2 = parse_harmonic("kind=poly;dim=3;degree=2;index=3");
  return d;
}

double h1_gap(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a;
  d -= b;
  return norm_h1(d);
}

}  // namespace

TEST_CASE("A = 0 gives the linear solution in one iteration") {
  Grid g = Grid::cube(3, 0.0, 1.0, 17);
  CoupledTensors A(g);
  BoundaryData data = poly_data();
  ForwardSolution sol = solve_forward(A, data, 0.01, 1e-12);
  CHECK(sol.residual_history.size() == 1);
  ScalarField ref = sample(data.f1, g);
  ref *= Cx{0.01, 0};
  CHECK(h1_gap(sol.u1, ref) <= 1e-14);
}

TEST_CASE("forward solver: boundary trace, contraction, PDE residual") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);
  BoundaryData data = poly_data();
  const double eps = 0.01;
  ForwardSolution sol = solve_forward(A, data, eps, 1e-12);

  // Boundary trace equals eps * data exactly (Green outputs vanish there).
  ScalarField v01 = sample(data.f1, g);
  double trace_err = 0.0;
  for (int64_t q = 0; q < sol.u1.size(); ++q)
    if (g.in_collar(g.unindex(q), 1))
      trace_err = std::max(trace_err, std::abs(sol.u1[q] - eps * v01[q]));
  CHECK(trace_err <= 1e-10);

  // Residual history decreases strictly after iteration 2 with a roughly
  // constant geometric ratio.
  const auto& hist = sol.residual_history;
  REQUIRE(hist.size() >= 4);
  for (size_t i = 2; i + 1 < hist.size(); ++i) CHECK(hist[i + 1] < hist[i]);
  CHECK(sol.contraction_ratio < 0.1);

  // Discrete PDE residual: Lap u + div(A : grad u (x) grad u) ~ 0.
  const VectorField g1 = gradient(sol.u1);
  const VectorField g2 = gradient(sol.u2);
  ScalarField resid = laplacian(sol.u1);
  const VectorField* grads[2] = {&g1, &g2};
  for (int K = 1; K <= 2; ++K) {
    VectorField V(g);
    for (int j = 0; j < 3; ++j) {
      ScalarField acc(g);
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          ScalarField t = A.at(1, K).comp(j, k, l);
          for (int64_t q = 0; q < t.size(); ++q)
            t[q] *= grads[0]->comp(k)[q] * grads[K - 1]->comp(l)[q];
          acc += t;
        }
      V.comp(j) = acc;
    }
    resid += divergence(V);
  }
  double interior = 0.0;
  for (int64_t q = 0; q < resid.size(); ++q)
    if (!g.in_collar(g.unindex(q), 3)) interior = std::max(interior, std::abs(resid[q]));
  // tol here is the solver tolerance the invariant is stated against; the
  // 10x headroom absorbs the discretization floor at this resolution.
  CHECK(interior <= 10.0 * 2e-6);
}

TEST_CASE("solution expands as eps v0 + eps^2 v1 + O(eps^3)") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);
  BoundaryData data = poly_data();
  ScalarField v01 = sample(data.f1, g);
  const auto v1 = second_corrector(A, data);

  std::vector<double> epss{1e-2, 7.5e-3, 5e-3, 2.5e-3};
  std::vector<double> first, second;
  for (double eps : epss) {
    ForwardSolution sol = solve_forward(A, data, eps, 1e-13);
    ScalarField lin = v01;
    lin *= Cx{eps, 0};
    first.push_back(h1_gap(sol.u1, lin));
    ScalarField quad = v1[0];
    quad *= Cx{eps * eps, 0};
    ScalarField both = lin;
    both += quad;
    second.push_back(h1_gap(sol.u1, both));
  }
  CHECK(fit_slope(epss, first).slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit_slope(epss, second).slope == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("oversized data triggers the smallness-violation guard") {
  Grid g = Grid::cube(3, 0.0, 1.0, 17);
  CoupledTensors A = planted_tensors(g, 40.0);
  BoundaryData data = poly_data();
  CHECK_THROWS_AS(solve_forward(A, data, 2.0, 1e-10), Error);
}

TEST_CASE("tensor invariants are validated") {
  Grid g = Grid::cube(3, 0.0, 1.0, 17);
  CoupledTensors bad(g);
  // Breaks the last-two symmetry of a diagonal block.
  bad.at(1, 1).comp(0, 1, 2).fill([](const std::vector<double>&) { return Cx{1, 0}; });
  BoundaryData data = poly_data();
  CHECK_THROWS_AS(solve_forward(bad, data, 0.01, 1e-10), Error);
}

TEST_CASE("dtn pairing: Green identity at A = 0 and conservation against constants") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A0(g);
  BoundaryData data = poly_data();
  const double eps = 0.01;
  auto pairing = dtn_pair(A0, data, eps, data.f1);

  VectorField gv = sample_gradient(data.f1, g);
  ScalarField dot(g);
  for (int a = 0; a < 3; ++a) {
    ScalarField t = gv.comp(a);
    for (int64_t q = 0; q < t.size(); ++q) t[q] *= gv.comp(a)[q];
    dot += t;
  }
  const Cx expect = eps * integrate(dot);
  CHECK(std::abs(pairing[0] - expect) <= 1e-10 * std::abs(expect));

  HarmonicFn one = constant_fn(3, Cx{1, 0});
  CoupledTensors A = planted_tensors(g);
  auto flux = dtn_pair(A, data, eps, one);
  CHECK(std::abs(flux[0]) <= 1e-14);
  CHECK(std::abs(flux[1]) <= 1e-14);
}

TEST_CASE("second linearization extracts the moment integral") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);
  BoundaryData data = poly_data();
  HarmonicFn w = parse_harmonic("kind=poly;dim=3;degree=2;index=0");
  std::vector<double> epss{1e-2, 7.5e-3, 5e-3, 2.5e-3};

  SecondLinearization lin = second_linearization(A, data, w, epss);
  const auto oracle = moment_oracle(A, data, w);
  for (int J = 0; J < 2; ++J) {
    CHECK(std::abs(lin.c2[J] - oracle[J]) <=
          1e-3 * std::max(1e-6, std::abs(oracle[J])));
  }

  // c2 is linear in w: w -> 2w doubles the coefficient.
  HarmonicFn w2 = w;
  w2.value = [w](const std::vector<double>& x) { return 2.0 * w.value(x); };
  w2.grad = [w](const std::vector<double>& x) {
    auto gr = w.grad(x);
    for (auto& z : gr) z *= 2.0;
    return gr;
  };
  SecondLinearization lin2 = second_linearization(A, data, w2, epss);
  for (int J = 0; J < 2; ++J)
    CHECK(std::abs(lin2.c2[J] - 2.0 * lin.c2[J]) <=
          1e-6 * std::max(1.0, std::abs(lin.c2[J])));

  // A = 0: c2 at fit-noise level.
  CoupledTensors A0(g);
  SecondLinearization lz = second_linearization(A0, data, w, epss);
  CHECK(std::abs(lz.c2[0]) <= 1e-8);

  // Narrow sweeps are rejected as ill-conditioned.
  CHECK_THROWS_AS(second_linearization(A, data, w, {1e-2, 0.99e-2, 0.98e-2}), Error);
}

TEST_CASE("f2 = 0 isolates the (1,1) moment") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);
  BoundaryData data;
  data.f1 = parse_harmonic("kind=poly;dim=3;degree=2;index=1");
  data.f2 = constant_fn(3, Cx{0, 0});
  HarmonicFn w = coordinate_fn(3, 2);
  std::vector<double> epss{1e-2, 7.5e-3, 5e-3, 2.5e-3};
  SecondLinearization lin = second_linearization(A, data, w, epss);
  // With f2 = 0 only the A^{11} moment survives in component 1.
  CoupledTensors only11(g);
  only11.at(1, 1) = A.at(1, 1);
  const auto oracle = moment_oracle(only11, data, w);
  CHECK(std::abs(lin.c2[0] - oracle[0]) <= 1e-3 * std::max(1e-6, std::abs(oracle[0])));
}

TEST_CASE("first-order DtN coefficient is symmetric in (f, w)") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);
  HarmonicFn f = parse_harmonic("kind=poly;dim=3;degree=2;index=2");
  HarmonicFn w = parse_harmonic("kind=poly;dim=3;degree=1;index=0");
  std::vector<double> epss{1e-2, 7.5e-3, 5e-3, 2.5e-3};
  BoundaryData d1{f, constant_fn(3, Cx{0, 0})};
  BoundaryData d2{w, constant_fn(3, Cx{0, 0})};
  SecondLinearization a = second_linearization(A, d1, w, epss);
  SecondLinearization b = second_linearization(A, d2, f, epss);
  CHECK(std::abs(a.c1[0] - b.c1[0]) <= 5e-7 * std::max(1.0, std::abs(a.c1[0])));  // within fit error
}

TEST_CASE("uniqueness experiment separates structured perturbations") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  CoupledTensors A = planted_tensors(g);

  // Dictionary of (w, f1, f2) triples; includes the linear triple that sees
  // Levi-Civita perturbations and a polarized (w, v, v) pair for symmetric
  // diagonal perturbations.
  std::vector<std::array<HarmonicFn, 3>> dict;
  dict.push_back({coordinate_fn(3, 0), coordinate_fn(3, 1), coordinate_fn(3, 2)});
  dict.push_back({coordinate_fn(3, 1), coordinate_fn(3, 0), coordinate_fn(3, 0)});
  dict.push_back({coordinate_fn(3, 2),
                  parse_harmonic("kind=poly;dim=3;degree=2;index=0"),
                  coordinate_fn(3, 1)});
  std::vector<double> epss{1e-2, 7.5e-3, 5e-3, 2.5e-3};

  UniquenessResult same = uniqueness_experiment(A, A, dict, epss);
  CHECK(same.max_gap <= std::max(same.fit_noise, 1e-12));
  CHECK(same.coverage_warning);  // 3 < 10 triples

  // Levi-Civita bump on A^{12}: the linear triple pins the gap to the
  // planted mass (integrand collapses to the bump density).
  CoupledTensors tilde = planted_tensors(g);
  AnalyticScalar bump = box_bump(g, 0.55);
  Tensor3Field lc = plant_levi_civita(g, bump);
  tilde.at(1, 2) = add(tilde.at(1, 2), lc);
  UniquenessResult sep = uniqueness_experiment(A, tilde, dict, epss);
  const Cx mass = integrate_uniform(sample_scalar(g, bump));
  CHECK(sep.max_gap >= 0.5 * std::abs(mass));
  CHECK(sep.max_gap >= 10.0 * sep.fit_noise);

  // Symmetric-in-last-two perturbation on A^{11}, caught by the polarized
  // triple.
  CoupledTensors tilde2 = planted_tensors(g);
  Tensor3Field sym(g);
  ScalarField s = sample_scalar(g, bump);
  sym.comp(1, 0, 0) += s;
  tilde2.at(1, 1) = add(tilde2.at(1, 1), sym);
  UniquenessResult sep2 = uniqueness_experiment(A, tilde2, dict, epss);
  CHECK(sep2.max_gap >= 10.0 * sep2.fit_noise);
}
