#ifndef HQM_FD_HPP
#define HQM_FD_HPP

#include <vector>

#include "hqm/field.hpp"

namespace hqm {

// Finite-difference weights for the m-th derivative at z from nodes x
// (Fornberg's recursion). Exact for polynomials of degree <= x.size()-1.
std::vector<double> fd_weights(double z, const std::vector<double>& x, int m);

// 4th-order accurate partial derivative along one axis. Centered 5-point
// stencils in the interior, one-sided stencils of the same order at box
// boundaries; periodic axes wrap around and stay centered everywhere.
ScalarField derivative(const ScalarField& f, int axis, int order = 1);

// grad f = (d_0 f, ..., d_n f); exact on degree-1 polynomials.
VectorField gradient(const ScalarField& f);

// Laplacian = sum of 4th-order second derivatives over all axes.
ScalarField laplacian(const ScalarField& f);

// Divergence of a vector field, sum_j d_j v_j.
ScalarField divergence(const VectorField& v);

// Tensor-product quadrature over the grid box. Non-periodic axes use
// composite Simpson (with a 3/8 block when the interval count is odd),
// exact for per-axis polynomials of degree <= 3; periodic axes use the
// torus trapezoid rule. Both are superalgebraically accurate for smooth
// integrands that are compactly supported or periodic.
Cx integrate(const ScalarField& f);

// Per-axis quadrature weights backing integrate().
std::vector<double> quadrature_weights_1d(int n, double h, bool periodic);

// Uniform-weight rule h^d * sum f: the natural quadrature for integrands
// that vanish near the boundary (or live on the torus). For those, every
// Euler-Maclaurin correction vanishes and the error is the integrand's
// spectral tail at 2 pi / h, far below composite Simpson, whose T(2h)
// component aliases at pi / h already. The gradient-product identities use
// this rule; their preconditions guarantee compact support.
Cx integrate_uniform(const ScalarField& f);

// Discrete norms used by solver diagnostics (quadrature-weighted).
double norm_l2(const ScalarField& f);
double norm_h1(const ScalarField& f);

}  // namespace hqm

#endif
