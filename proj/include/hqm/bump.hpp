#ifndef HQM_BUMP_HPP
#define HQM_BUMP_HPP

#include <cmath>
#include <string>

namespace hqm {

// Smooth transition built from phi(u) = exp(-1/u): 0 for u <= 0, 1 for
// u >= 1, C-infinity in between.
inline double smoothstep_c_inf(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// Standard C-infinity cutoff: 1 on |t| < 1/2, 0 on |t| > 1.
inline double bump_chi(double t) { return smoothstep_c_inf(2.0 * (1.0 - std::fabs(t))); }

// d/dt of bump_chi by the chain rule on the closed-form smoothstep.
inline double bump_chi_prime(double t) {
  const double u = 2.0 * (1.0 - std::fabs(t));
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  const double da = a / (u * u);
  const double db = -b / ((1.0 - u) * (1.0 - u));
  const double ds = (da * b - a * db) / ((a + b) * (a + b));
  return ds * (t >= 0.0 ? -2.0 : 2.0);
}

// Compactly supported profile exp(1 - 1/(1 - t^2)) on |t| < 1, used by the
// planted test fields; value 1 at t = 0.
inline double bump_profile(double t) {
  if (std::fabs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

inline double bump_profile_prime(double t) {
  if (std::fabs(t) >= 1.0) return 0.0;
  const double w = 1.0 - t * t;
  return bump_profile(t) * (-2.0 * t / (w * w));
}

// Flatter family exp(1 - (1 - t^2)^{-alpha}): alpha = 1 is bump_profile;
// larger alpha gives faster Fourier decay (~exp(-c K^{alpha/(alpha+1)})),
// which the quadrature-accuracy-critical plants use.
inline double bump_profile_alpha(double t, int alpha) {
  if (std::fabs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - std::pow(1.0 - t * t, -alpha));
}

inline double bump_profile_alpha_prime(double t, int alpha) {
  if (std::fabs(t) >= 1.0) return 0.0;
  const double w = 1.0 - t * t;
  return bump_profile_alpha(t, alpha) * (-2.0 * alpha * t * std::pow(w, -alpha - 1));
}

// Recorded in reports so runs are reproducible from the text alone.
inline std::string bump_chi_description() {
  return "chi(t)=S(2(1-|t|)) with S(u)=phi(u)/(phi(u)+phi(1-u)), phi(u)=exp(-1/u); "
         "chi=1 on |t|<1/2, chi=0 on |t|>1";
}

}  // namespace hqm

#endif
