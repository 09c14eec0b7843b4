#include "hqm/field.hpp"

#include <cmath>

#include "hqm/parallel.hpp"

namespace hqm {

void ScalarField::fill(const std::function<Cx(const std::vector<double>&)>& f) {
  const int d = grid_.dim();
  parallel_for(size(), [&](int64_t b, int64_t e) {
    std::vector<int> idx;
    std::vector<double> x(d);
    for (int64_t k = b; k < e; ++k) {
      idx = grid_.unindex(k);
      for (int a = 0; a < d; ++a) x[a] = grid_.coord(a, idx[a]);
      v_[k] = f(x);
    }
  });
}

bool ScalarField::finite() const {
  for (const Cx& z : v_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const Cx& z : v_) m = std::max(m, std::abs(z));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (int64_t k = 0; k < size(); ++k) v_[k] += o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (int64_t k = 0; k < size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(Cx c) {
  for (Cx& z : v_) z *= c;
  return *this;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, c.max_abs());
  return m;
}

double Tensor2Field::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, c.max_abs());
  return m;
}

double Tensor3Field::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, c.max_abs());
  return m;
}

bool vanishes_on_collar(const ScalarField& f, int collar, double tol) {
  const Grid& g = f.grid();
  if (g.periodic()) return true;
  for (int64_t k = 0; k < f.size(); ++k) {
    if (std::abs(f[k]) > tol && g.in_collar(g.unindex(k), collar)) return false;
  }
  return true;
}

bool vanishes_on_collar(const Tensor2Field& f, int collar, double tol) {
  for (int j = 0; j < f.dim(); ++j)
    for (int k = 0; k < f.dim(); ++k)
      if (!vanishes_on_collar(f.comp(j, k), collar, tol)) return false;
  return true;
}

bool vanishes_on_collar(const Tensor3Field& f, int collar, double tol) {
  for (int j = 0; j < f.dim(); ++j)
    for (int k = 0; k < f.dim(); ++k)
      for (int l = 0; l < f.dim(); ++l)
        if (!vanishes_on_collar(f.comp(j, k, l), collar, tol)) return false;
  return true;
}

}  // namespace hqm
