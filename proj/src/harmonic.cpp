#include "hqm/harmonic.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "hqm/errors.hpp"
#include "hqm/fd.hpp"
#include "hqm/linalg.hpp"

namespace hqm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Cx cdot(const std::vector<Cx>& a, const std::vector<Cx>& b) {
  Cx s{0, 0};
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];  // bilinear, no conj
  return s;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

// ---- real polynomial bundles -------------------------------------------

// Sparse real polynomial: exponent rows (one int per axis) with coefficients.
struct Poly {
  int dim;
  std::vector<std::vector<int>> expo;
  std::vector<double> coef;

  double eval(const std::vector<double>& x) const {
    double acc = 0.0;
    for (size_t t = 0; t < coef.size(); ++t) {
      double m = coef[t];
      for (int a = 0; a < dim; ++a)
        for (int p = 0; p < expo[t][a]; ++p) m *= x[a];
      acc += m;
    }
    return acc;
  }

  Poly derivative(int axis) const {
    Poly d{dim, {}, {}};
    for (size_t t = 0; t < coef.size(); ++t) {
      if (expo[t][axis] == 0) continue;
      auto e = expo[t];
      const double c = coef[t] * e[axis];
      e[axis] -= 1;
      d.expo.push_back(e);
      d.coef.push_back(c);
    }
    return d;
  }
};

HarmonicFn wrap_poly(const Poly& p, const std::string& descriptor) {
  std::vector<Poly> grads;
  Poly lap{p.dim, {}, {}};
  for (int a = 0; a < p.dim; ++a) {
    grads.push_back(p.derivative(a));
    const Poly second = grads.back().derivative(a);
    lap.expo.insert(lap.expo.end(), second.expo.begin(), second.expo.end());
    lap.coef.insert(lap.coef.end(), second.coef.begin(), second.coef.end());
  }
  HarmonicFn f;
  f.dim = p.dim;
  f.descriptor = descriptor;
  f.value = [p](const std::vector<double>& x) { return Cx{p.eval(x), 0.0}; };
  f.grad = [grads, d = p.dim](const std::vector<double>& x) {
    std::vector<Cx> g(d);
    for (int a = 0; a < d; ++a) g[a] = Cx{grads[a].eval(x), 0.0};
    return g;
  };
  f.lap = [lap](const std::vector<double>& x) { return Cx{lap.eval(x), 0.0}; };
  return f;
}

// All exponent vectors of total degree `deg` in `dim` variables,
// lexicographic, deterministic.
void enumerate_monomials(int dim, int deg, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == dim - 1) {
    int used = 0;
    for (int e : cur) used += e;
    cur.push_back(deg - used);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  int used = 0;
  for (int e : cur) used += e;
  for (int e = deg - used; e >= 0; --e) {
    cur.push_back(e);
    enumerate_monomials(dim, deg, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> monomials(int dim, int deg) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_monomials(dim, deg, cur, out);
  return out;
}

// Kernel of the Laplacian on homogeneous degree-d polynomials.
std::vector<Poly> harmonic_basis_of_degree(int dim, int deg) {
  if (deg == 0) return {Poly{dim, {std::vector<int>(dim, 0)}, {1.0}}};
  const auto mons = monomials(dim, deg);
  const auto target = monomials(dim, deg - 2 >= 0 ? deg - 2 : 0);
  std::map<std::vector<int>, int> row_of;
  for (size_t r = 0; r < target.size(); ++r) row_of[target[r]] = static_cast<int>(r);

  const int m = deg >= 2 ? static_cast<int>(target.size()) : 1;
  const int n = static_cast<int>(mons.size());
  std::vector<double> A(static_cast<size_t>(m) * n, 0.0);
  if (deg >= 2) {
    for (int c = 0; c < n; ++c) {
      for (int a = 0; a < dim; ++a) {
        const int e = mons[c][a];
        if (e < 2) continue;
        auto reduced = mons[c];
        reduced[a] -= 2;
        A[row_of[reduced] * static_cast<size_t>(n) + c] += e * (e - 1);
      }
    }
  }
  const auto kernel = kernel_basis(std::move(A), deg >= 2 ? m : 1, n);
  std::vector<Poly> basis;
  for (const auto& v : kernel) {
    Poly p{dim, {}, {}};
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    for (int c = 0; c < n; ++c) {
      if (std::fabs(v[c]) < 1e-12 * scale) continue;
      p.expo.push_back(mons[c]);
      p.coef.push_back(v[c] / scale);
    }
    basis.push_back(std::move(p));
  }
  return basis;
}

}  // namespace

CalderonPair calderon_pair(const std::vector<double>& xi,
                           const std::vector<double>& nu) {
  require(xi.size() == nu.size(), ErrorKind::Precondition, "xi/nu rank mismatch");
  const double xn = std::sqrt(dot(xi, xi));
  require(xn > 0.0, ErrorKind::Precondition, "xi must be nonzero");
  require(std::fabs(dot(xi, nu)) <= 1e-12 * std::max(1.0, xn),
          ErrorKind::Precondition, "nu must be orthogonal to xi");
  require(std::fabs(dot(nu, nu) - 1.0) <= 1e-12, ErrorKind::Precondition,
          "nu must be a unit vector");
  CalderonPair p;
  p.xi = xi;
  p.nu = nu;
  p.zeta_plus.resize(xi.size());
  p.zeta_minus.resize(xi.size());
  for (size_t j = 0; j < xi.size(); ++j) {
    p.zeta_plus[j] = 0.5 * Cx{xi[j], xn * nu[j]};
    p.zeta_minus[j] = 0.5 * Cx{xi[j], -xn * nu[j]};
  }
  return p;
}

HarmonicFn calderon_wave(const std::vector<Cx>& zeta) {
  Cx zz = cdot(zeta, zeta);
  double scale = 0.0;
  for (const Cx& z : zeta) scale += std::norm(z);
  require(std::abs(zz) <= 1e-12 * std::max(1.0, scale), ErrorKind::Precondition,
          "zeta must be a null vector (zeta.zeta = 0)");
  HarmonicFn f;
  f.dim = static_cast<int>(zeta.size());
  std::ostringstream os;
  os.precision(17);
  os << "kind=wave;zeta_re=";
  for (size_t j = 0; j < zeta.size(); ++j) os << (j ? "," : "") << zeta[j].real();
  os << ";zeta_im=";
  for (size_t j = 0; j < zeta.size(); ++j) os << (j ? "," : "") << zeta[j].imag();
  f.descriptor = os.str();
  f.value = [zeta](const std::vector<double>& x) {
    Cx ph{0, 0};
    for (size_t j = 0; j < zeta.size(); ++j) ph += zeta[j] * x[j];
    return std::exp(kImag * ph);
  };
  f.grad = [zeta, val = f.value](const std::vector<double>& x) {
    const Cx v = val(x);
    std::vector<Cx> g(zeta.size());
    for (size_t j = 0; j < zeta.size(); ++j) g[j] = kImag * zeta[j] * v;
    return g;
  };
  f.lap = [](const std::vector<double>&) { return Cx{0, 0}; };
  return f;
}

HarmonicFn constant_fn(int dim, Cx value) {
  HarmonicFn f;
  f.dim = dim;
  std::ostringstream os;
  os.precision(17);
  os << "kind=constant;dim=" << dim << ";value=" << value.real() << "," << value.imag();
  f.descriptor = os.str();
  f.value = [value](const std::vector<double>&) { return value; };
  f.grad = [dim](const std::vector<double>&) { return std::vector<Cx>(dim, Cx{0, 0}); };
  f.lap = [](const std::vector<double>&) { return Cx{0, 0}; };
  return f;
}

HarmonicFn coordinate_fn(int dim, int axis) {
  require(axis >= 0 && axis < dim, ErrorKind::Precondition, "axis out of range");
  HarmonicFn f;
  f.dim = dim;
  f.descriptor = "kind=coordinate;dim=" + std::to_string(dim) +
                 ";axis=" + std::to_string(axis);
  f.value = [axis](const std::vector<double>& x) { return Cx{x[axis], 0.0}; };
  f.grad = [dim, axis](const std::vector<double>&) {
    std::vector<Cx> g(dim, Cx{0, 0});
    g[axis] = Cx{1.0, 0.0};
    return g;
  };
  f.lap = [](const std::vector<double>&) { return Cx{0, 0}; };
  return f;
}

HarmonicFn point_source(const std::vector<double>& pole,
                        const std::vector<double>& box_lo,
                        const std::vector<double>& box_hi) {
  const int dim = static_cast<int>(pole.size());
  bool inside = true;
  for (int a = 0; a < dim; ++a)
    if (pole[a] < box_lo[a] || pole[a] > box_hi[a]) inside = false;
  require(!inside, ErrorKind::Precondition,
          "point-source pole must lie outside the sampling box");
  HarmonicFn f;
  f.dim = dim;
  f.descriptor = "kind=pointsource;pole=" + join(pole);
  auto r2 = [pole](const std::vector<double>& x) {
    double s = 0.0;
    for (size_t a = 0; a < pole.size(); ++a) s += sq(x[a] - pole[a]);
    return s;
  };
  if (dim == 2) {
    f.value = [r2](const std::vector<double>& x) {
      return Cx{0.5 * std::log(r2(x)), 0.0};
    };
    f.grad = [pole, r2](const std::vector<double>& x) {
      const double s = r2(x);
      std::vector<Cx> g(pole.size());
      for (size_t a = 0; a < pole.size(); ++a) g[a] = Cx{(x[a] - pole[a]) / s, 0.0};
      return g;
    };
  } else {
    const double p = 0.5 * (2.0 - dim);
    f.value = [r2, p](const std::vector<double>& x) {
      return Cx{std::pow(r2(x), p), 0.0};
    };
    f.grad = [pole, r2, p, dim](const std::vector<double>& x) {
      const double s = r2(x);
      const double fac = (2.0 - dim) * std::pow(s, p - 1.0);
      std::vector<Cx> g(pole.size());
      for (size_t a = 0; a < pole.size(); ++a) g[a] = Cx{fac * (x[a] - pole[a]), 0.0};
      return g;
    };
  }
  f.lap = [](const std::vector<double>&) { return Cx{0, 0}; };
  return f;
}

std::vector<HarmonicFn> harmonic_polynomials(int max_degree, int dim) {
  require(max_degree >= 0 && max_degree <= 6, ErrorKind::Precondition,
          "max_degree limited to 6 at desk scale");
  std::vector<HarmonicFn> out;
  for (int deg = 0; deg <= max_degree; ++deg) {
    const auto basis = harmonic_basis_of_degree(dim, deg);
    for (size_t i = 0; i < basis.size(); ++i) {
      std::ostringstream os;
      os << "kind=poly;dim=" << dim << ";degree=" << deg << ";index=" << i;
      out.push_back(wrap_poly(basis[i], os.str()));
    }
  }
  return out;
}

int harmonic_polynomial_count(int degree, int dim) {
  auto choose = [](int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
  };
  if (degree == 0) return 1;
  return choose(dim + degree - 1, degree) - choose(dim + degree - 3, degree - 2);
}

double harmonicity_residual(const HarmonicFn& f, const Grid& g) {
  ScalarField s = sample(f, g);
  ScalarField lap = laplacian(s);
  const double scale = s.max_abs();
  double res = 0.0;
  for (int64_t k = 0; k < lap.size(); ++k)
    if (!g.in_collar(g.unindex(k), 1)) res = std::max(res, std::abs(lap[k]));
  return res / std::max(scale, 1e-300);
}

ScalarField sample(const HarmonicFn& f, const Grid& g) {
  require(f.dim == g.dim(), ErrorKind::Precondition, "dimension mismatch");
  ScalarField s(g);
  s.fill([&f](const std::vector<double>& x) { return f.value(x); });
  return s;
}

VectorField sample_gradient(const HarmonicFn& f, const Grid& g) {
  require(f.dim == g.dim(), ErrorKind::Precondition, "dimension mismatch");
  VectorField v(g);
  ScalarField probe(g);
  const int d = g.dim();
  std::vector<std::vector<Cx>*> comps(d);
  for (int a = 0; a < d; ++a) comps[a] = &v.comp(a).data();
  for (int64_t k = 0; k < probe.size(); ++k) {
    const auto idx = g.unindex(k);
    const auto x = g.point(idx);
    const auto grad = f.grad(x);
    for (int a = 0; a < d; ++a) (*comps[a])[k] = grad[a];
  }
  return v;
}

HarmonicFn parse_harmonic(const std::string& descriptor) {
  std::map<std::string, std::string> kv;
  std::istringstream is(descriptor);
  std::string item;
  while (std::getline(is, item, ';')) {
    const auto eq = item.find('=');
    require(eq != std::string::npos, ErrorKind::Config,
            "malformed descriptor item: " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  require(kv.count("kind"), ErrorKind::Config, "descriptor missing kind");
  const std::string kind = kv["kind"];
  if (kind == "constant") {
    const auto v = split_doubles(kv.at("value"));
    return constant_fn(std::stoi(kv.at("dim")), Cx{v[0], v.size() > 1 ? v[1] : 0.0});
  }
  if (kind == "coordinate")
    return coordinate_fn(std::stoi(kv.at("dim")), std::stoi(kv.at("axis")));
  if (kind == "poly") {
    const int dim = std::stoi(kv.at("dim"));
    const int degree = std::stoi(kv.at("degree"));
    for (auto& f : harmonic_polynomials(degree, dim))
      if (f.descriptor == descriptor) return f;
    throw Error(ErrorKind::Config, "no such polynomial: " + descriptor);
  }
  if (kind == "calderon") {
    const auto xi = split_doubles(kv.at("xi"));
    const auto nu = split_doubles(kv.at("nu"));
    const double factor = kv.count("factor") ? std::stod(kv.at("factor")) : 1.0;
    const bool plus = kv.count("sign") ? (kv.at("sign") == "+") : true;
    CalderonPair p = calderon_pair(xi, nu);
    std::vector<Cx> zeta = plus ? p.zeta_plus : p.zeta_minus;
    for (Cx& z : zeta) z *= factor;
    HarmonicFn f = calderon_wave(zeta);
    f.descriptor = descriptor;
    return f;
  }
  if (kind == "wave") {
    const auto re = split_doubles(kv.at("zeta_re"));
    const auto im = split_doubles(kv.at("zeta_im"));
    std::vector<Cx> zeta(re.size());
    for (size_t j = 0; j < re.size(); ++j) zeta[j] = {re[j], im[j]};
    return calderon_wave(zeta);
  }
  if (kind == "pointsource") {
    const auto pole = split_doubles(kv.at("pole"));
    // The caller re-validates against its own grid; parse with a permissive box.
    std::vector<double> lo(pole.size(), 1e300), hi(pole.size(), -1e300);
    HarmonicFn f = point_source(pole, lo, hi);
    f.descriptor = descriptor;
    return f;
  }
  throw Error(ErrorKind::Config, "unknown harmonic kind: " + kind);
}

}  // namespace hqm
