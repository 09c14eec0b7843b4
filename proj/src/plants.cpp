#include "hqm/plants.hpp"

#include <cmath>

#include "hqm/bump.hpp"
#include "hqm/errors.hpp"

namespace hqm {

AnalyticScalar bump_scalar(std::vector<double> center, std::vector<double> radius,
                           int alpha) {
  AnalyticScalar f;
  f.value = [center, radius, alpha](const std::vector<double>& x) {
    double v = 1.0;
    for (size_t a = 0; a < center.size(); ++a)
      v *= bump_profile_alpha((x[a] - center[a]) / radius[a], alpha);
    return v;
  };
  f.grad = [center, radius, alpha](const std::vector<double>& x) {
    const size_t d = center.size();
    std::vector<double> vals(d), ders(d);
    for (size_t a = 0; a < d; ++a) {
      const double t = (x[a] - center[a]) / radius[a];
      vals[a] = bump_profile_alpha(t, alpha);
      ders[a] = bump_profile_alpha_prime(t, alpha) / radius[a];
    }
    std::vector<double> g(d);
    for (size_t a = 0; a < d; ++a) {
      double v = ders[a];
      for (size_t b = 0; b < d; ++b)
        if (b != a) v *= vals[b];
      g[a] = v;
    }
    return g;
  };
  return f;
}

AnalyticScalar box_bump(const Grid& g, double shrink, int alpha) {
  std::vector<double> center(g.dim()), radius(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    center[a] = 0.5 * (g.lo(a) + g.hi(a));
    radius[a] = 0.5 * (g.hi(a) - g.lo(a)) * shrink;
  }
  return bump_scalar(std::move(center), std::move(radius), alpha);
}

TrigPoly::TrigPoly(const Grid& g, std::vector<std::vector<int>> modes,
                   std::vector<Cx> coeffs)
    : grid_(g), modes_(std::move(modes)), coeffs_(std::move(coeffs)) {
  require(grid_.periodic(), ErrorKind::Precondition,
          "TrigPoly lives on a periodic grid");
  require(modes_.size() == coeffs_.size(), ErrorKind::Precondition, "size mismatch");
}

TrigPoly TrigPoly::random(const Grid& g, int mmax, Rng& rng, double amplitude) {
  std::vector<std::vector<int>> modes;
  std::vector<Cx> coeffs;
  std::vector<int> m(g.dim(), -mmax);
  // Enumerate all modes with |m|_inf <= mmax and pair m with -m Hermitianly.
  while (true) {
    bool zero = true, canonical = false;
    for (int a = 0; a < g.dim(); ++a)
      if (m[a] != 0) { zero = false; canonical = m[a] > 0; break; }
    if (!zero && canonical) {
      const Cx c = amplitude * rng.complex_in_disk(1.0);
      if (c != Cx{0, 0}) {
        modes.push_back(m);
        coeffs.push_back(c);
        std::vector<int> neg(m);
        for (int& q : neg) q = -q;
        modes.push_back(neg);
        coeffs.push_back(std::conj(c));
      }
    }
    int a = g.dim() - 1;
    while (a >= 0 && m[a] == mmax) m[a--] = -mmax;
    if (a < 0) break;
    ++m[a];
  }
  return TrigPoly(g, std::move(modes), std::move(coeffs));
}

std::vector<double> TrigPoly::wavevec(const std::vector<int>& m) const {
  std::vector<double> k(grid_.dim());
  for (int a = 0; a < grid_.dim(); ++a)
    k[a] = 2.0 * M_PI * m[a] / (grid_.hi(a) - grid_.lo(a));
  return k;
}

double TrigPoly::value(const std::vector<double>& x) const {
  Cx acc{0, 0};
  for (size_t q = 0; q < modes_.size(); ++q) {
    const auto k = wavevec(modes_[q]);
    double ph = 0.0;
    for (int a = 0; a < grid_.dim(); ++a) ph += k[a] * x[a];
    acc += coeffs_[q] * std::exp(kImag * ph);
  }
  return acc.real();
}

std::vector<double> TrigPoly::grad(const std::vector<double>& x) const {
  std::vector<Cx> acc(grid_.dim(), Cx{0, 0});
  for (size_t q = 0; q < modes_.size(); ++q) {
    const auto k = wavevec(modes_[q]);
    double ph = 0.0;
    for (int a = 0; a < grid_.dim(); ++a) ph += k[a] * x[a];
    const Cx e = coeffs_[q] * std::exp(kImag * ph) * kImag;
    for (int a = 0; a < grid_.dim(); ++a) acc[a] += e * k[a];
  }
  std::vector<double> g(grid_.dim());
  for (int a = 0; a < grid_.dim(); ++a) g[a] = acc[a].real();
  return g;
}

Cx TrigPoly::fourier(const std::vector<double>& xi) const {
  // int e^{i(k_m - xi).x} dx = vol * [k_m == xi] on the torus.
  Cx acc{0, 0};
  for (size_t q = 0; q < modes_.size(); ++q) {
    const auto k = wavevec(modes_[q]);
    bool match = true;
    for (int a = 0; a < grid_.dim(); ++a)
      if (std::fabs(k[a] - xi[a]) > 1e-9) { match = false; break; }
    if (match) acc += coeffs_[q];
  }
  // Phase convention: modes are e^{i k . x} with x measured absolutely, so
  // the integral over the box picks the matching coefficient times volume.
  return acc * grid_.volume();
}

AnalyticScalar TrigPoly::as_scalar() const {
  TrigPoly copy = *this;
  AnalyticScalar f;
  f.value = [copy](const std::vector<double>& x) { return copy.value(x); };
  f.grad = [copy](const std::vector<double>& x) { return copy.grad(x); };
  return f;
}

ScalarField sample_scalar(const Grid& g, const AnalyticScalar& f) {
  ScalarField s(g);
  s.fill([&](const std::vector<double>& x) { return Cx{f.value(x), 0.0}; });
  return s;
}

Tensor3Field plant_structure(const Grid& g, const std::vector<AnalyticScalar>& b) {
  require(static_cast<int>(b.size()) == g.dim(), ErrorKind::Precondition,
          "component count mismatch");
  Tensor3Field B(g);
  std::vector<ScalarField> bs;
  bs.reserve(b.size());
  for (const auto& comp : b) bs.push_back(sample_scalar(g, comp));
  const int d = g.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        ScalarField& out = B.comp(j, k, l);
        if (k == l) out += bs[j];
        if (j == l) out -= bs[k];
      }
  return B;
}

Tensor3Field plant_levi_civita(const Grid& g, const AnalyticScalar& f) {
  require(g.dim() == 3, ErrorKind::Precondition, "Levi-Civita plant needs dim 3");
  Tensor3Field B(g);
  ScalarField s = sample_scalar(g, f);
  const int perms[6][4] = {{0, 1, 2, +1}, {1, 2, 0, +1}, {2, 0, 1, +1},
                           {0, 2, 1, -1}, {2, 1, 0, -1}, {1, 0, 2, -1}};
  for (const auto& p : perms) {
    ScalarField t = s;
    t *= Cx{static_cast<double>(p[3]), 0};
    B.comp(p[0], p[1], p[2]) += t;
  }
  return B;
}

Tensor3Field add(const Tensor3Field& a, const Tensor3Field& b) {
  Tensor3Field out = a;
  const int d = a.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) out.comp(j, k, l) += b.comp(j, k, l);
  return out;
}

Tensor3Field scale(const Tensor3Field& a, Cx c) {
  Tensor3Field out = a;
  const int d = a.dim();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) out.comp(j, k, l) *= c;
  return out;
}

}  // namespace hqm
