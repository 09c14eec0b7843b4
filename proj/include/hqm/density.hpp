#ifndef HQM_DENSITY_HPP
#define HQM_DENSITY_HPP

#include <functional>
#include <vector>

#include "hqm/field.hpp"
#include "hqm/harmonic.hpp"
#include "hqm/report.hpp"

namespace hqm {

// Quadrature of the three-gradient contraction
//   int B : grad u1 (x) grad u2 (x) grad u3 dx
// with closed-form gradients. B must be compactly supported in the grid
// interior (or live on a periodic grid).
Cx triple_identity(const Tensor3Field& B, const HarmonicFn& u1, const HarmonicFn& u2,
                   const HarmonicFn& u3);

enum class SymmetryMode { LastTwoSym, Cyclic };

// Last-two symmetrization (B_jkl + B_jlk)/2 or the cyclic average
// (B_jkl + B_klj + B_ljk)/3. The cyclic average of a tensor antisymmetric
// in its first two indices is fully antisymmetric and annihilates the
// b_j delta_kl - b_k delta_jl structure family.
Tensor3Field symmetry_reduce(const Tensor3Field& B, SymmetryMode mode);

// Fit of the structure B_jkl = b_j delta_kl - b_k delta_jl:
// b_j = mean over k != j of B_jkk, residual = max-norm of the misfit.
struct StructureFit {
  VectorField b;
  double residual;
  StructureFit(const Grid& g) : b(g), residual(0.0) {}
};
StructureFit structure_fit(const Tensor3Field& B);

// Fourier-side recovery of b from the two Calderon-pair triple identities.
// For each xi (with an orthonormal basis nu_1..nu_{d-1} of its complement):
//   I+ = int B : grad(e^{i z+ . x}) (x) grad(e^{2i z- . x}) (x) grad(e^{i z+ . x})
// equals -i |xi|^2 bhat(-2 xi) . z+, and the z- companion likewise; sums and
// differences isolate bhat(-2 xi) . xi and bhat(-2 xi) . nu. Convention
// bhat(xi) = int b e^{-i xi . x} dx.
struct RecoveredSample {
  std::vector<double> xi;
  Cx b_dot_xi;                 // bhat(-2 xi) . xi
  std::vector<Cx> b_dot_nu;    // bhat(-2 xi) . nu_i
  std::vector<Cx> b_hat;       // assembled bhat(-2 xi)
  double constant_check;       // residual of the -i|xi|^2 constant assertion
};
std::vector<RecoveredSample> calderon_recover_b(
    const Tensor3Field& B, const std::vector<std::vector<double>>& xi_samples);

// Taylor coefficients of (1-z)^{-3/2} [5 (1-z)^{-1} + (1+z)^{-1}]:
// c_j = sum_{l=0}^{j} [5 + (-1)^{j-l}] (2l+1)!! / (2^l l!), every one
// strictly positive. Accumulated in extended precision past j = 50.
std::vector<double> jacobi_moment_coeffs(int jmax);

// Numerical verification of the weighted-moment expansion
//   int_I f(t) (t - i eps)^{-mu} dt
//     = sum_k (i eps)^k mu(mu+1)...(mu+k-1)/k! int_I f(t) t^{-mu-k} dt
// for 0 < eps < dist(0, I); reports per-eps agreement against the
// truncation tail bound.
struct WeightedMomentOptions {
  int terms = 10;
  int samples = 4097;
};
ExperimentReport weighted_moment_expand(const std::function<double(double)>& f,
                                        double a, double b, double mu,
                                        const std::vector<double>& eps_list,
                                        const WeightedMomentOptions& opts = {});

// Series coefficient mu(mu+1)...(mu+k-1)/k! of the expansion above.
double rising_factorial_coeff(double mu, int k);

}  // namespace hqm

#endif
