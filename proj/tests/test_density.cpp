#include <cmath>

#include "doctest.h"
#include "hqm/density.hpp"
#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/jet.hpp"
#include "hqm/plants.hpp"
#include "hqm/rng.hpp"

using namespace hqm;

namespace {

Tensor3Field random_smooth_tensor(const Grid& g, Rng& rng) {
  Tensor3Field B(g);
  const AnalyticScalar bump = box_bump(g, 0.7);
  const int d = g.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const double c_re = rng.uniform(-1, 1), c_im = rng.uniform(-1, 1);
        const double ph = rng.uniform(0, 2 * M_PI);
        B.comp(j, k, l).fill([&](const std::vector<double>& x) {
          const double mod = std::cos(2 * x[0] + 3 * x[1] - x[2] + ph);
          return Cx{c_re, c_im} * bump.value(x) * mod;
        });
      }
  return B;
}

}  // namespace

TEST_CASE("triple identity: zero tensor, Levi-Civita plant, parity annihilation") {
  Grid g = Grid::cube(3, 0.0, 1.0, 25);
  Tensor3Field zero(g);
  HarmonicFn x0 = coordinate_fn(3, 0), x1 = coordinate_fn(3, 1), x2 = coordinate_fn(3, 2);
  CHECK(std::abs(triple_identity(zero, x0, x1, x2)) == 0.0);

  // eps_jkl * b(x) with int b = 0.1: the contraction against the coordinate
  // gradients collapses to b itself, so the identity value IS the planted
  // mass under the same compact-support quadrature.
  AnalyticScalar bump = box_bump(g, 0.7);
  const Cx raw = integrate_uniform(sample_scalar(g, bump));
  AnalyticScalar scaled = bump;
  const double factor = 0.1 / raw.real();
  scaled.value = [bump, factor](const std::vector<double>& x) {
    return factor * bump.value(x);
  };
  Tensor3Field lc = plant_levi_civita(g, scaled);
  CHECK(std::abs(triple_identity(lc, x0, x1, x2) - Cx{0.1, 0}) <= 1e-12);

  // Antisymmetrized-in-last-two tensor against u2 = u3 dies pointwise.
  Rng rng(12);
  Tensor3Field B = random_smooth_tensor(g, rng);
  Tensor3Field anti = add(B, scale(symmetry_reduce(B, SymmetryMode::LastTwoSym), -1.0));
  HarmonicFn w = parse_harmonic("kind=poly;dim=3;degree=2;index=1");
  const double scale_I = anti.max_abs() * 10.0;
  CHECK(std::abs(triple_identity(anti, x0, w, w)) <= 1e-12 * scale_I);
}

TEST_CASE("triple identity rejects support touching the boundary") {
  Grid g = Grid::cube(3, 0.0, 1.0, 12);
  Tensor3Field B(g);
  B.comp(0, 1, 2).fill([](const std::vector<double>&) { return Cx{1, 0}; });
  HarmonicFn x0 = coordinate_fn(3, 0);
  CHECK_THROWS_AS(triple_identity(B, x0, x0, x0), Error);
}

TEST_CASE("symmetry_reduce: cyclic averages and the elementary tensor") {
  Grid g = Grid::cube(3, 0.0, 1.0, 12);
  // Fully antisymmetric input is a cyclic fixed point.
  Tensor3Field A = plant_levi_civita(g, box_bump(g));
  Tensor3Field cyc = symmetry_reduce(A, SymmetryMode::Cyclic);
  double diff = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int64_t q = 0; q < A.grid().size(); ++q)
          diff = std::max(diff, std::abs(A.comp(j, k, l)[q] - cyc.comp(j, k, l)[q]));
  CHECK(diff <= 1e-15);

  // Elementary e0 (x) e1 (x) e2.
  Tensor3Field E(g);
  E.comp(0, 1, 2).fill([](const std::vector<double>&) { return Cx{1, 0}; });
  Tensor3Field ec = symmetry_reduce(E, SymmetryMode::Cyclic);
  CHECK(std::abs(ec.comp(0, 1, 2)[0] - Cx{1.0 / 3.0, 0}) <= 1e-15);
  CHECK(std::abs(ec.comp(1, 2, 0)[0] - Cx{1.0 / 3.0, 0}) <= 1e-15);
  CHECK(std::abs(ec.comp(2, 0, 1)[0] - Cx{1.0 / 3.0, 0}) <= 1e-15);
  CHECK(std::abs(ec.comp(0, 2, 1)[0]) == 0.0);
}

TEST_CASE("cyclic reduction preserves the averaged triple identity") {
  Grid g = Grid::cube(3, 0.0, 1.0, 17);
  Rng rng(77);
  Tensor3Field B = random_smooth_tensor(g, rng);
  Tensor3Field cyc = symmetry_reduce(B, SymmetryMode::Cyclic);
  HarmonicFn u1 = parse_harmonic("kind=poly;dim=3;degree=2;index=0");
  HarmonicFn u2 = coordinate_fn(3, 1);
  HarmonicFn u3 = parse_harmonic("kind=poly;dim=3;degree=2;index=3");
  const Cx lhs = triple_identity(cyc, u1, u2, u3);
  const Cx avg = (triple_identity(B, u1, u2, u3) + triple_identity(B, u2, u3, u1) +
                  triple_identity(B, u3, u1, u2)) /
                 3.0;
  CHECK(std::abs(lhs - avg) <= 1e-12 * std::max(1.0, std::abs(avg)));
}

TEST_CASE("structure_fit recovers plants and measures the antisymmetric misfit") {
  Grid g = Grid::cube(3, 0.0, 1.0, 17);
  AnalyticScalar bump = box_bump(g, 0.7);
  AnalyticScalar zero;
  zero.value = [](const std::vector<double>&) { return 0.0; };
  zero.grad = [](const std::vector<double>& x) {
    return std::vector<double>(x.size(), 0.0);
  };

  // Planted b = bump * e0.
  Tensor3Field S = plant_structure(g, {bump, zero, zero});
  StructureFit fit = structure_fit(S);
  CHECK(fit.residual <= 1e-12);
  ScalarField expect = sample_scalar(g, bump);
  double db = 0.0;
  for (int64_t q = 0; q < expect.size(); ++q)
    db = std::max(db, std::abs(fit.b.comp(0)[q] - expect[q]));
  CHECK(db <= 1e-12);

  // Levi-Civita: all traces vanish, so b = 0 and the misfit is everything.
  Tensor3Field lc = plant_levi_civita(g, bump);
  StructureFit lcfit = structure_fit(lc);
  CHECK(lcfit.b.max_abs() <= 1e-14);
  CHECK(lcfit.residual == doctest::Approx(lc.max_abs()).epsilon(1e-12));

  // Structure + fully antisymmetric part: traces see only the structure, the
  // residual is exactly the antisymmetric part, which cyclic averaging
  // extracts (it annihilates the structure family).
  Tensor3Field mixed = add(S, lc);
  StructureFit mfit = structure_fit(mixed);
  Tensor3Field anti_part = symmetry_reduce(mixed, SymmetryMode::Cyclic);
  CHECK(mfit.residual == doctest::Approx(anti_part.max_abs()).epsilon(1e-10));
  db = 0.0;
  for (int64_t q = 0; q < expect.size(); ++q)
    db = std::max(db, std::abs(mfit.b.comp(0)[q] - expect[q]));
  CHECK(db <= 1e-12);

  // Projection property: fitting the reconstruction changes nothing.
  Tensor3Field recon = plant_structure(g, {bump, zero, zero});
  StructureFit again = structure_fit(recon);
  CHECK(again.residual <= 1e-12);
}

TEST_CASE("calderon_recover_b matches the exact Fourier oracle on the torus") {
  Grid g = Grid::cube(3, 0.0, 1.0, 32, /*periodic=*/true);
  Rng rng(2025);
  std::vector<TrigPoly> b;
  std::vector<AnalyticScalar> b_scalar;
  for (int a = 0; a < 3; ++a) {
    b.push_back(TrigPoly::random(g, 2, rng, 0.5));
    b_scalar.push_back(b.back().as_scalar());
  }
  Tensor3Field B = plant_structure(g, b_scalar);

  std::vector<std::vector<double>> xis = {
      {M_PI, 0, 0}, {0, M_PI, M_PI}, {2 * M_PI, -M_PI, 0}, {M_PI, M_PI, M_PI},
      {0, 0, 2 * M_PI}};
  auto recs = calderon_recover_b(B, xis);
  for (const auto& rec : recs) {
    std::vector<double> minus2xi(3);
    for (int a = 0; a < 3; ++a) minus2xi[a] = -2.0 * rec.xi[a];
    std::vector<Cx> oracle(3);
    double scale = 0.0;
    for (int a = 0; a < 3; ++a) {
      oracle[a] = b[a].fourier(minus2xi);
      scale = std::max(scale, std::abs(oracle[a]));
    }
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(rec.b_hat[a] - oracle[a]) <= 1e-6 * std::max(scale, 1e-3));
    // Projections recovered by the add/subtract routes.
    Cx oxi{0, 0};
    for (int a = 0; a < 3; ++a) oxi += oracle[a] * rec.xi[a];
    CHECK(std::abs(rec.b_dot_xi - oxi) <= 1e-6 * std::max(1.0, std::abs(oxi)));
    CHECK(rec.constant_check <= 1e-8);
  }

  // Zero field recovers zero.
  Tensor3Field zero(g);
  auto zrec = calderon_recover_b(zero, {{M_PI, 0, 0}});
  for (int a = 0; a < 3; ++a) CHECK(std::abs(zrec[0].b_hat[a]) <= 1e-12);

  // Conditioning guard.
  CHECK_THROWS_AS(calderon_recover_b(B, {{1e-12, 0, 0}}), Error);

  // Recovery is linear in B: doubling the plant doubles the samples.
  auto recs2 = calderon_recover_b(scale(B, Cx{2, 0}), {xis[0]});
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(recs2[0].b_hat[a] - 2.0 * recs[0].b_hat[a]) <=
          1e-9 * std::max(1.0, std::abs(recs[0].b_hat[a])));
}

TEST_CASE("calderon_recover_b requires the exact structure") {
  Grid g = Grid::cube(3, 0.0, 1.0, 16, /*periodic=*/true);
  Rng rng(4);
  TrigPoly f = TrigPoly::random(g, 1, rng, 1.0);
  Tensor3Field notstruct(g);
  notstruct.comp(0, 1, 2).fill(
      [&](const std::vector<double>& x) { return Cx{f.value(x), 0}; });
  CHECK_THROWS_AS(calderon_recover_b(notstruct, {{M_PI, 0, 0}}), Error);
}

TEST_CASE("moment coefficients: first values, positivity, generating function") {
  auto c = jacobi_moment_coeffs(50);
  CHECK(c[0] == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(13.0).epsilon(1e-14));
  for (double v : c) CHECK(v > 0.0);
  auto c200 = jacobi_moment_coeffs(200);
  for (double v : c200) CHECK(v > 0.0);

  // Jet route: (1-z)^{-3/2} [5 (1-z)^{-1} + (1+z)^{-1}] via exp/log series.
  const int N = 50;
  Jet log1m(N);  // log(1/(1-z)) = sum z^k / k
  for (int k = 1; k <= N; ++k) log1m.coeff(k) = Cx{1.0 / k, 0};
  Jet expo(N);   // exp(1.5 * log1m)
  expo.coeff(0) = Cx{1, 0};
  Jet pw = log1m * Cx{1.5, 0};
  Jet term(N);
  term.coeff(0) = Cx{1, 0};
  double fact = 1.0;
  for (int n = 1; n <= N; ++n) {
    term = term * pw;
    fact *= n;
    expo = expo + term * Cx{1.0 / fact, 0};
  }
  Jet geo_p(N), geo_m(N);
  for (int k = 0; k <= N; ++k) {
    geo_p.coeff(k) = Cx{1.0, 0};
    geo_m.coeff(k) = Cx{(k % 2 == 0) ? 1.0 : -1.0, 0};
  }
  Jet gen = expo * (geo_p * Cx{5, 0} + geo_m);
  for (int j = 0; j <= 50; ++j)
    CHECK(std::abs(gen.coeff(j).real() - c[j]) <= 1e-9 * c[j]);
}

TEST_CASE("weighted moment expansion against direct quadrature") {
  auto one = [](double) { return 1.0; };
  ExperimentReport rep = weighted_moment_expand(one, 1.0, 2.0, 1.0, {0.1});
  CHECK(rep.pass());
  // Spec pin: 10-term series agrees to 1e-8 for f = 1 on [1,2], mu = 1.
  CHECK(rep.metrics()[0].value <= 1e-8);

  // k = 1 series coefficient is mu.
  CHECK(rising_factorial_coeff(1.7, 1) == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(rising_factorial_coeff(0.5, 3) ==
        doctest::Approx(0.5 * 1.5 * 2.5 / 6.0).epsilon(1e-14));

  auto fzero = [](double) { return 0.0; };
  ExperimentReport rz = weighted_moment_expand(fzero, 1.0, 2.0, 1.5, {0.2});
  CHECK(rz.pass());

  auto wiggle = [](double t) { return std::sin(3 * t) + 0.2 * t; };
  ExperimentReport rw =
      weighted_moment_expand(wiggle, 0.5, 1.5, 0.75, {0.05, 0.1, 0.2});
  CHECK(rw.pass());

  CHECK_THROWS_AS(weighted_moment_expand(one, 1.0, 2.0, 1.0, {1.5}), Error);
}
