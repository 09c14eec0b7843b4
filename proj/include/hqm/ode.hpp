#ifndef HQM_ODE_HPP
#define HQM_ODE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "hqm/errors.hpp"
#include "hqm/types.hpp"

namespace hqm {

// Adaptive Cash-Karp 4(5) integrator for complex-vector ODEs y' = f(x, y).
// Used as the numeric cross-check of the exact hierarchy solves and for
// closed-form-vs-ODE verification.
inline std::vector<Cx> rk45(
    const std::function<std::vector<Cx>(double, const std::vector<Cx>&)>& f,
    double x0, double x1, std::vector<Cx> y, double tol = 1e-11) {
  static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static const double b21 = 0.2;
  static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
  static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static const double b51 = -11.0 / 54, b52 = 2.5, b53 = -70.0 / 27, b54 = 35.0 / 27;
  static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                      b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
  static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                      c6 = 512.0 / 1771;
  static const double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                      d5 = 277.0 / 14336, d6 = 0.25;

  const int n = static_cast<int>(y.size());
  const double dir = (x1 >= x0) ? 1.0 : -1.0;
  double x = x0;
  double h = dir * std::max(1e-8, std::abs(x1 - x0) / 64.0);
  int steps = 0;
  while (dir * (x1 - x) > 1e-14 * std::abs(x1 - x0)) {
    require(++steps < 2000000, ErrorKind::Diagnostics, "rk45 step budget exhausted");
    if (dir * (x + h - x1) > 0) h = x1 - x;
    auto k1 = f(x, y);
    std::vector<Cx> t(n);
    for (int i = 0; i < n; ++i) t[i] = y[i] + h * b21 * k1[i];
    auto k2 = f(x + a2 * h, t);
    for (int i = 0; i < n; ++i) t[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    auto k3 = f(x + a3 * h, t);
    for (int i = 0; i < n; ++i)
      t[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    auto k4 = f(x + a4 * h, t);
    for (int i = 0; i < n; ++i)
      t[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    auto k5 = f(x + a5 * h, t);
    for (int i = 0; i < n; ++i)
      t[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] +
                         b65 * k5[i]);
    auto k6 = f(x + a6 * h, t);

    double err = 0.0, scale = 1e-30;
    std::vector<Cx> y5(n);
    for (int i = 0; i < n; ++i) {
      const Cx hi5 = c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i];
      const Cx hi4 = d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i];
      y5[i] = y[i] + h * hi5;
      err = std::max(err, std::abs(h * (hi5 - hi4)));
      scale = std::max(scale, std::abs(y5[i]));
    }
    if (err <= tol * std::max(1.0, scale)) {
      x += h;
      y = std::move(y5);
      h *= std::min(5.0, 0.9 * std::pow(tol * std::max(1.0, scale) /
                                            std::max(err, 1e-300), 0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(tol * std::max(1.0, scale) / err, 0.25));
    }
  }
  return y;
}

}  // namespace hqm

#endif
