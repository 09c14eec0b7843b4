#include "hqm/jet.hpp"

#include <algorithm>

namespace hqm {

Cx Jet::derivative_at_zero(int m) const {
  if (m > order()) return {0, 0};
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  return fact * c_[m];
}

Cx Jet::eval(Cx t) const {
  Cx acc{0, 0};
  for (int k = order(); k >= 0; --k) acc = acc * t + c_[k];
  return acc;
}

Jet Jet::truncated(int order) const {
  Jet out(order);
  for (int k = 0; k <= std::min(order, this->order()); ++k) out.c_[k] = c_[k];
  return out;
}

Jet Jet::derivative() const {
  Jet out(std::max(0, order() - 1));
  for (int k = 1; k <= order(); ++k) out.c_[k - 1] = static_cast<double>(k) * c_[k];
  return out;
}

Jet Jet::operator+(const Jet& o) const {
  Jet out(std::min(order(), o.order()));
  for (int k = 0; k <= out.order(); ++k) out.c_[k] = c_[k] + o.c_[k];
  return out;
}

Jet Jet::operator-(const Jet& o) const {
  Jet out(std::min(order(), o.order()));
  for (int k = 0; k <= out.order(); ++k) out.c_[k] = c_[k] - o.c_[k];
  return out;
}

Jet Jet::operator*(const Jet& o) const {
  Jet out(std::min(order(), o.order()));
  for (int k = 0; k <= out.order(); ++k) {
    Cx acc{0, 0};
    for (int a = 0; a <= k; ++a) acc += coeff(a) * o.coeff(k - a);
    out.c_[k] = acc;
  }
  return out;
}

Jet Jet::operator*(Cx s) const {
  Jet out = *this;
  for (Cx& z : out.c_) z *= s;
  return out;
}

Jet Jet::pow(int n) const {
  Jet out(order());
  out.coeff(0) = Cx{1, 0};
  Jet base = *this;
  int e = n;
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

}  // namespace hqm
