#ifndef HQM_JET_HPP
#define HQM_JET_HPP

#include <vector>

#include "hqm/types.hpp"

namespace hqm {

// Truncated Taylor series at the expansion point 0 in one variable.
// Arithmetic is closed under truncation at the shorter operand's order,
// which keeps every retained coefficient exact.
class Jet {
 public:
  explicit Jet(int order) : c_(order + 1, Cx{0, 0}) {}
  explicit Jet(std::vector<Cx> coeffs) : c_(std::move(coeffs)) {}

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Cx coeff(int k) const { return k <= order() ? c_[k] : Cx{0, 0}; }
  Cx& coeff(int k) { return c_[k]; }

  // m-th derivative at 0 read off the coefficients: m! * c_m.
  Cx derivative_at_zero(int m) const;

  Cx eval(Cx t) const;

  Jet truncated(int order) const;
  Jet derivative() const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator*(Cx s) const;
  friend Jet operator*(Cx s, const Jet& j) { return j * s; }
  Jet pow(int n) const;

 private:
  std::vector<Cx> c_;
};

}  // namespace hqm

#endif
