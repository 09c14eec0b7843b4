#ifndef HQM_STATIONARY_HPP
#define HQM_STATIONARY_HPP

#include <functional>

#include "hqm/jet.hpp"
#include "hqm/types.hpp"

namespace hqm {

// General stationary-phase coefficient operator
//
//   L_j U = sum_{nu-mu=j, 2nu>=3mu} i^{-j} (1/(nu! mu!))
//           (-1/(2F''(0)))^nu  d^{2nu}/dt^{2nu} (G^mu U)(0),
//
// with G(t) = F(t) - F(0) - F''(0) t^2 / 2. Requires F'(0) = 0 and
// F''(0) != 0; jets must carry coefficients up to order 6j.
Cx lj_general(const Jet& F, const Jet& U, int j);

// Phase expansions of the transverse variable at fixed x1: F2 carries the
// Gaussian-decay part (even, leading coefficient 4i*eps/(x1^2+eps^2)/2),
// F1 the oscillatory companion. Truncated at the two displayed orders.
struct PhaseProfile {
  Jet F1_jet;
  Jet F2_jet;
};
PhaseProfile make_phase_profile(double x1, double eps, int order = 16);

// Closed-form specializations of L_0, L_1, L_2 for the F2 profile, with
// constants fixed by agreement with lj_general on the F2 jet (and by an
// independent quadrature sweep): L_1's zeroth-order coefficient is 3/4 and
// L_2's quartic-derivative factor is (x1^2+eps^2)^2. The literal variants
// evaluate the corresponding printed forms (1/8 and (x1^2+eps)^2) so
// reports can show both readings side by side.
Cx lj_specialized(const Jet& U, double x1, double eps, int j);
Cx l1_literal_variant(const Jet& U, double x1, double eps);
Cx l2_literal_variant(const Jet& U, double x1, double eps);

// sqrt(2 pi i / (lambda F2''(0))) evaluated both through the complex
// square root and through the equivalent real closed form
// sqrt(pi (x1^2+eps^2) / (2 lambda eps)); asserts the two agree to 1e-12.
Cx expansion_prefactor(double x1, double eps, double lambda);

// k-term expansion e^{i lambda F(0)} sqrt(2 pi i/(lambda F''(0)))
// sum_{j<k} lambda^{-j} L_j U.
Cx stationary_expansion(const Jet& F, const Jet& U, double lambda, int k);

struct QuadratureOptions {
  double abs_tol = 1e-12;
  int max_depth = 40;
  bool apply_cutoff = true;  // smooth cutoff keeping U compactly supported
};

// Adaptive quadrature of int_a^b e^{i lambda F(t)} U(t) dt for phases with
// Im F >= 0 (the integrand decays, no contour machinery needed).
Cx oscillatory_quadrature(const std::function<Cx(double)>& F,
                          const std::function<Cx(double)>& U, double lambda,
                          double a, double b, const QuadratureOptions& opts = {});

}  // namespace hqm

#endif
