#ifndef HQM_LAURENT_HPP
#define HQM_LAURENT_HPP

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "hqm/errors.hpp"
#include "hqm/types.hpp"

namespace hqm {

// Finite combination  sum c_{e,r} s^e log(s)^r  with s = x1 - i*eps,
// exponents e in (1/2)Z (stored as twice the exponent) and nonnegative
// integer log powers. The log terms are forced by resonances in the
// amplitude transport ODEs (first at order v_{0;4} in the zero-constant
// gauge); the algebra is closed under products, d/dx1 and the first-order
// ODE solves of the hierarchies, so every coefficient function stays exact.
class LaurentPoly {
 public:
  using Key = std::pair<int, int>;  // (twice-exponent, log power)

  LaurentPoly() = default;

  static LaurentPoly term(int twice_exponent, Cx coeff, int log_pow = 0) {
    LaurentPoly p;
    if (coeff != Cx{0, 0}) p.c_[{twice_exponent, log_pow}] = coeff;
    return p;
  }

  bool zero() const { return c_.empty(); }
  const std::map<Key, Cx>& terms() const { return c_; }

  double max_coeff() const {
    double m = 0.0;
    for (const auto& [k, c] : c_) m = std::max(m, std::abs(c));
    return m;
  }

  bool has_log() const {
    for (const auto& [k, c] : c_)
      if (k.second > 0) return true;
    return false;
  }

  // Copy with coefficients at or below `tol` removed. The hierarchy
  // builders use this to strip round-off residue of exact cancellations
  // before an ODE solve turns it into a spurious (tiny) log term.
  LaurentPoly cleaned(double tol) const {
    LaurentPoly out;
    for (const auto& [k, c] : c_)
      if (std::abs(c) > tol) out.c_[k] = c;
    return out;
  }

  void add_term(int twice_exponent, Cx coeff, int log_pow = 0) {
    auto& slot = c_[{twice_exponent, log_pow}];
    slot += coeff;
    if (std::abs(slot) == 0.0) c_.erase({twice_exponent, log_pow});
  }

  LaurentPoly operator+(const LaurentPoly& o) const {
    LaurentPoly out = *this;
    for (const auto& [k, c] : o.c_) out.add_term(k.first, c, k.second);
    return out;
  }
  LaurentPoly operator-(const LaurentPoly& o) const {
    LaurentPoly out = *this;
    for (const auto& [k, c] : o.c_) out.add_term(k.first, -c, k.second);
    return out;
  }
  LaurentPoly operator*(const LaurentPoly& o) const {
    LaurentPoly out;
    for (const auto& [k1, c1] : c_)
      for (const auto& [k2, c2] : o.c_)
        out.add_term(k1.first + k2.first, c1 * c2, k1.second + k2.second);
    return out;
  }
  LaurentPoly operator*(Cx sc) const {
    LaurentPoly out;
    if (sc == Cx{0, 0}) return out;
    for (const auto& [k, c] : c_) out.c_[k] = c * sc;
    return out;
  }
  friend LaurentPoly operator*(Cx sc, const LaurentPoly& p) { return p * sc; }

  // d/dx1: (s^e L^r)' = e s^{e-1} L^r + r s^{e-1} L^{r-1}, L = log s.
  LaurentPoly derivative() const {
    LaurentPoly out;
    for (const auto& [k, c] : c_) {
      const auto [e2, r] = k;
      if (e2 != 0) out.add_term(e2 - 2, 0.5 * static_cast<double>(e2) * c, r);
      if (r > 0) out.add_term(e2 - 2, static_cast<double>(r) * c, r - 1);
    }
    return out;
  }

  // Principal-branch evaluation; x1 > 0 keeps s in the right half-plane so
  // neither the fractional powers nor the logarithm cross a branch cut.
  Cx eval(double x1, double eps) const {
    const Cx s{x1, -eps};
    const Cx logs = std::log(s);
    Cx acc{0, 0};
    for (const auto& [k, c] : c_) {
      Cx t = c * std::pow(s, 0.5 * k.first);
      for (int q = 0; q < k.second; ++q) t *= logs;
      acc += t;
    }
    return acc;
  }

  // Particular solution of  y' + (c_h / s) y = *this  in the zero-constant
  // gauge (no s^{-c_h} component and, in the resonant case, no log-free
  // companion). twice_ch is 2*c_h. Non-resonant columns solve the small
  // triangular system over log powers; a resonant column s^{-c_h-1} L^r
  // integrates to s^{-c_h} L^{r+1}/(r+1).
  LaurentPoly solve_linear_ode(int twice_ch) const {
    LaurentPoly out;
    // Group by power column.
    std::map<int, std::map<int, Cx>> columns;  // p2 -> logpow -> coeff
    for (const auto& [k, c] : c_) columns[k.first][k.second] = c;
    for (const auto& [p2, col] : columns) {
      const int denom2 = p2 + 2 + twice_ch;  // 2(p + 1 + c_h)
      if (denom2 == 0) {
        for (const auto& [r, c] : col)
          out.add_term(p2 + 2, c / static_cast<double>(r + 1), r + 1);
        continue;
      }
      const double d = 0.5 * denom2;
      int rmax = 0;
      for (const auto& [r, c] : col) rmax = std::max(rmax, r);
      // a_t d + (t+1) a_{t+1} = rhs_t, a_{rmax+1} = 0.
      std::map<int, Cx> a;
      Cx above{0, 0};
      for (int t = rmax; t >= 0; --t) {
        const auto it = col.find(t);
        const Cx rhs = (it == col.end()) ? Cx{0, 0} : it->second;
        a[t] = (rhs - static_cast<double>(t + 1) * above) / d;
        above = a[t];
      }
      for (const auto& [t, c] : a) out.add_term(p2 + 2, c, t);
    }
    return out;
  }

 private:
  std::map<Key, Cx> c_;
};

}  // namespace hqm

#endif
