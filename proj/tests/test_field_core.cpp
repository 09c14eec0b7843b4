#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "hqm/dst.hpp"
#include "hqm/fd.hpp"
#include "hqm/field.hpp"
#include "hqm/io.hpp"
#include "hqm/report.hpp"
#include "hqm/rng.hpp"

using namespace hqm;

namespace {

double max_err(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int64_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("gradient annihilates constants and is exact on degree-1 polynomials") {
  Grid g = Grid::cube(3, 0.0, 1.0, 12);
  ScalarField one(g);
  one.fill([](const std::vector<double>&) { return Cx{1.0, 0.0}; });
  VectorField d1 = gradient(one);
  for (int a = 0; a < 3; ++a) CHECK(d1.comp(a).max_abs() <= 1e-13);

  ScalarField x0(g);
  x0.fill([](const std::vector<double>& x) { return Cx{x[0], 0.0}; });
  VectorField d2 = gradient(x0);
  ScalarField expect(g);
  expect.fill([](const std::vector<double>&) { return Cx{1.0, 0.0}; });
  CHECK(max_err(d2.comp(0), expect) <= 1e-12);
  CHECK(d2.comp(1).max_abs() <= 1e-12);
  CHECK(d2.comp(2).max_abs() <= 1e-12);
}

TEST_CASE("gradient converges at 4th order against the closed-form derivative") {
  std::vector<double> hs, errs;
  for (int n : {17, 25, 33, 49, 65}) {
    Grid g = Grid::cube(2, 0.0, 1.0, n);
    ScalarField f(g);
    f.fill([](const std::vector<double>& x) { return Cx{std::sin(M_PI * x[0]), 0.0}; });
    ScalarField ref(g);
    ref.fill([](const std::vector<double>& x) {
      return Cx{M_PI * std::cos(M_PI * x[0]), 0.0};
    });
    hs.push_back(g.spacing(0));
    errs.push_back(max_err(gradient(f).comp(0), ref));
  }
  SlopeFit fit = fit_slope(hs, errs);
  CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("laplacian of harmonic and quadratic polynomials") {
  Grid g = Grid::cube(3, -1.0, 1.0, 16);
  ScalarField harm(g);
  harm.fill([](const std::vector<double>& x) { return Cx{x[0] * x[0] - x[1] * x[1], 0.0}; });
  CHECK(laplacian(harm).max_abs() <= 1e-10);

  ScalarField quad(g);
  quad.fill([](const std::vector<double>& x) { return Cx{x[0] * x[0], 0.0}; });
  ScalarField two(g);
  two.fill([](const std::vector<double>&) { return Cx{2.0, 0.0}; });
  CHECK(max_err(laplacian(quad), two) <= 1e-10);
}

TEST_CASE("laplacian residual of a complex exponential harmonic decays at order 4") {
  // exp(i zeta . x) with zeta = (1, i, 0): null vector, so the function is
  // harmonic; the discrete residual is pure truncation error.
  std::vector<double> hs, errs;
  for (int n : {17, 25, 33, 49}) {
    Grid g = Grid::cube(3, 0.0, 1.0, n);
    ScalarField f(g);
    f.fill([](const std::vector<double>& x) {
      return std::exp(Cx{-x[1], x[0]});
    });
    hs.push_back(g.spacing(0));
    errs.push_back(laplacian(f).max_abs());
  }
  SlopeFit fit = fit_slope(hs, errs);
  CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.12));
}

TEST_CASE("laplacian equals divergence of gradient to discretization order") {
  std::vector<double> hs, errs;
  for (int n : {17, 25, 33, 49}) {
    Grid g = Grid::cube(2, 0.0, 1.0, n);
    ScalarField f(g);
    f.fill([](const std::vector<double>& x) {
      return Cx{std::sin(2.0 * x[0]) * std::cos(1.5 * x[1]), std::cos(x[0] + x[1])};
    });
    hs.push_back(g.spacing(0));
    errs.push_back(max_err(laplacian(f), divergence(gradient(f))));
  }
  SlopeFit fit = fit_slope(hs, errs);
  // Both operators are 4th order; composing two first derivatives loses one
  // order where the one-sided boundary closures meet, so the difference
  // decays at >= 3rd order globally.
  CHECK(fit.slope >= 2.9);
}

TEST_CASE("integrate: exactness and closed-form oracle") {
  Grid g = Grid::cube(3, 0.0, 1.0, 9);
  ScalarField one(g);
  one.fill([](const std::vector<double>&) { return Cx{1.0, 0.0}; });
  CHECK(std::abs(integrate(one) - Cx{1.0, 0.0}) <= 1e-13);

  ScalarField xyz(g);
  xyz.fill([](const std::vector<double>& x) { return Cx{x[0] * x[1] * x[2], 0.0}; });
  CHECK(std::abs(integrate(xyz) - Cx{0.125, 0.0}) <= 1e-13);

  std::vector<double> hs, errs;
  const double exact = 4.0 / (M_PI * M_PI);
  for (int n : {9, 17, 33, 65}) {
    Grid gg = Grid::cube(2, 0.0, 1.0, n);
    ScalarField f(gg);
    f.fill([](const std::vector<double>& x) {
      return Cx{std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]), 0.0};
    });
    hs.push_back(gg.spacing(0));
    errs.push_back(std::abs(integrate(f).real() - exact));
  }
  SlopeFit fit = fit_slope(hs, errs);
  CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("integrate respects translation symmetry of periodic integrands") {
  Grid g = Grid::cube(2, 0.0, 1.0, 32, /*periodic=*/true);
  auto f = [](double s, const std::vector<double>& x) {
    return Cx{std::sin(2 * M_PI * (x[0] - s)) * std::cos(4 * M_PI * (x[1] + 2 * s)) + 0.3,
              std::cos(2 * M_PI * (x[0] + s))};
  };
  ScalarField f0(g), f1(g);
  f0.fill([&](const std::vector<double>& x) { return f(0.0, x); });
  f1.fill([&](const std::vector<double>& x) { return f(0.371, x); });
  CHECK(std::abs(integrate(f0) - integrate(f1)) <= 1e-13);
}

TEST_CASE("green_dirichlet inverts the Laplacian on sine eigenfunctions") {
  Grid g = Grid::cube(2, 0.0, 1.0, 33);
  ScalarField zero(g);
  CHECK(green_dirichlet(zero).max_abs() == 0.0);

  ScalarField src(g);
  src.fill([](const std::vector<double>& x) {
    return Cx{-2.0 * M_PI * M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]), 0.0};
  });
  ScalarField expect(g);
  expect.fill([](const std::vector<double>& x) {
    return Cx{std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]), 0.0};
  });
  CHECK(max_err(green_dirichlet(src), expect) <= 1e-12);
}

TEST_CASE("green_dirichlet output vanishes identically on boundary samples") {
  Grid g = Grid::cube(2, -0.5, 1.5, 17);
  ScalarField src(g);
  Rng rng(7);
  for (int64_t k = 0; k < src.size(); ++k)
    src[k] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  ScalarField u = green_dirichlet(src);
  for (int64_t k = 0; k < u.size(); ++k)
    if (g.in_collar(g.unindex(k), 1)) CHECK(std::abs(u[k]) == 0.0);
}

TEST_CASE("laplacian(green_dirichlet(s)) round-trips band-limited sources") {
  Grid g = Grid::cube(2, 0.0, 1.0, 513);
  Rng rng(11);
  std::vector<double> c(4);
  for (double& x : c) x = rng.uniform(-1, 1);
  ScalarField s(g);
  s.fill([&](const std::vector<double>& x) {
    Cx acc{0, 0};
    int q = 0;
    for (int k0 = 1; k0 <= 2; ++k0)
      for (int k1 = 1; k1 <= 2; ++k1)
        acc += c[q++] * std::sin(k0 * M_PI * x[0]) * std::sin(k1 * M_PI * x[1]);
    return acc;
  });
  ScalarField back = laplacian(green_dirichlet(s));
  double err = 0.0;
  for (int64_t k = 0; k < s.size(); ++k)
    if (!g.in_collar(g.unindex(k), 3)) err = std::max(err, std::abs(back[k] - s[k]));
  CHECK(err / s.max_abs() <= 1e-8);
}

TEST_CASE("gradient, laplacian and green_dirichlet are linear") {
  Grid g = Grid::cube(2, 0.0, 1.0, 17);
  Rng rng(3);
  ScalarField f1(g), f2(g);
  for (int64_t k = 0; k < f1.size(); ++k) {
    f1[k] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    f2[k] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  }
  const Cx a{0.7, -0.3}, b{-1.2, 0.4};
  ScalarField combo = a * f1 + b * f2;

  CHECK(max_err(laplacian(combo), a * laplacian(f1) + b * laplacian(f2)) <= 1e-10);
  CHECK(max_err(gradient(combo).comp(1),
                a * gradient(f1).comp(1) + b * gradient(f2).comp(1)) <= 1e-12);
  CHECK(max_err(green_dirichlet(combo),
                a * green_dirichlet(f1) + b * green_dirichlet(f2)) <= 1e-12);
}

TEST_CASE("grid and operator error paths") {
  CHECK_THROWS_AS(Grid::cube(3, 0.0, 1.0, 6), Error);          // resolution < 8
  CHECK_THROWS_AS(Grid::cube(1, 0.0, 1.0, 16), Error);         // dim < 2
  CHECK_THROWS_AS(Grid::cube(2, 1.0, 1.0, 16), Error);         // degenerate extent
  Grid torus = Grid::cube(2, 0.0, 1.0, 16, /*periodic=*/true);
  ScalarField s(torus);
  CHECK_THROWS_AS(green_dirichlet(s), Error);                  // no box boundary
}

TEST_CASE("field binary serialization round-trips with JSON sidecar") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "hqm_field_io_test.bin").string();
  Grid g(std::vector<double>{0.0, -1.0}, std::vector<double>{2.0, 1.0},
         std::vector<int>{9, 11});
  ScalarField f(g);
  Rng rng(5);
  for (int64_t k = 0; k < f.size(); ++k) f[k] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
  save_field(path, f);
  ScalarField back = load_scalar_field(path);
  CHECK(back.grid().compatible(g));
  CHECK(max_err(back, f) == 0.0);
  fs::remove(path);
  fs::remove(path + ".json");
}

TEST_CASE("tensor fields round-trip through the binary layout") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "hqm_tensor_io_test.bin").string();
  Grid g = Grid::cube(3, 0.0, 1.0, 9, /*periodic=*/true);
  Tensor3Field t(g);
  Rng rng(21);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int64_t q = 0; q < g.size(); ++q)
          t.comp(j, k, l)[q] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  save_field(path, t);
  Tensor3Field back = load_tensor3_field(path);
  CHECK(back.grid().periodic());  // restored from the sidecar
  double diff = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int64_t q = 0; q < g.size(); ++q)
          diff = std::max(diff, std::abs(back.comp(j, k, l)[q] - t.comp(j, k, l)[q]));
  CHECK(diff == 0.0);
  fs::remove(path);
  fs::remove(path + ".json");
}

TEST_CASE("fit_slope harness examples") {
  std::vector<double> xs{0.1, 0.2, 0.4, 0.8};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(x * x);
  SlopeFit f = fit_slope(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.stderr <= 1e-12);

  Rng rng(17);
  std::vector<double> noisy;
  for (double x : xs) noisy.push_back(std::pow(x, 4) * (1.0 + 0.01 * rng.uniform(-1, 1)));
  CHECK(fit_slope(xs, noisy).slope == doctest::Approx(4.0).epsilon(0.025));

  std::vector<double> flat{1.0, 1.0, 1.0, 1.0};
  std::vector<double> xr{1.0, 2.0, 5.0, 10.0};
  CHECK(std::fabs(fit_slope(xr, flat).slope) <= 1e-12);

  CHECK_THROWS_AS(fit_slope({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(fit_slope({1.0, 2.0, 3.0, 4.0}, {1.0, -2.0, 3.0, 4.0}), Error);
}
