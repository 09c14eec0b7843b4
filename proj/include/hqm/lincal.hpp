#ifndef HQM_LINCAL_HPP
#define HQM_LINCAL_HPP

#include <functional>
#include <vector>

#include "hqm/field.hpp"
#include "hqm/harmonic.hpp"
#include "hqm/plants.hpp"
#include "hqm/report.hpp"

namespace hqm {

// Obstruction data for the two-gradient identity: a vector field v vanishing
// on a boundary collar (the W^{1,p}_0 surrogate, 3 cells) and an
// antisymmetric matrix field a with divergence-free rows, realized
// discretely as compact support + interior discrete divergence <= 1e-10.
struct ObstructionPair {
  VectorField v;
  Tensor2Field a;
  ObstructionPair(const Grid& g) : v(g), a(g) {}
};

inline constexpr int kCollarCells = 3;

// Validates the pair invariants (antisymmetry exact, collar zeros, discrete
// row divergence below tolerance).
void validate_obstruction(const ObstructionPair& pair, double div_tol = 1e-10);

// C_jk = d_j v_k + d_k v_j - delta_jk div v + a_jk, assembled with the
// 4th-order discrete derivatives of the sampled v.
Tensor2Field build_obstruction(const ObstructionPair& pair);

// Analytic route: same assembly from closed-form v and a = rows of
// eps_jkl d_l phi for closed-form scalars phi_l; both the sampled pair and
// the analytically assembled C are returned, so identity checks can run at
// quadrature accuracy instead of finite-difference accuracy.
struct AnalyticObstruction {
  ObstructionPair pair;
  Tensor2Field C;
  AnalyticObstruction(const Grid& g) : pair(g), C(g) {}
};
AnalyticObstruction make_obstruction(const Grid& g,
                                     const std::vector<AnalyticScalar>& v_comps,
                                     const std::vector<AnalyticScalar>& curl_potentials);

// Randomized obstruction plant: per-component shifted bumps for v plus one
// curl-potential antisymmetric part (dim 3). alpha = 3 bumps favor
// quadrature accuracy (identity gates), alpha = 1 small FD constants
// (decompose round trips). Geometry clears the 3-cell collar at 33^3+.
AnalyticObstruction random_obstruction_plant(const Grid& g, Rng& rng,
                                             bool with_a = true, int alpha = 3);

// int C : grad u1 (x) grad u2 dx with closed-form gradients. The overload
// taking presampled gradient fields serves dictionary sweeps, where
// resampling the same gradients per identity would dominate the runtime.
Cx double_identity(const Tensor2Field& C, const HarmonicFn& u1, const HarmonicFn& u2);
Cx double_identity(const Tensor2Field& C, const VectorField& grad_u1,
                   const VectorField& grad_u2);

// Split C = C^s + C^a, recover v_j = sum_k G0(d_k C^s_jk), and return the
// residual B = C^s - (sym grad v - delta div v). B vanishes to
// discretization accuracy exactly when C satisfies the orthogonality
// hypothesis; a is the pointwise antisymmetric part (exact projection).
struct Decomposition {
  VectorField v;
  Tensor2Field a;
  Tensor2Field B_residual;
  double fourier_row_divergence;   // max over sampled lattice xi of |sum_j xi_j C^a_jk|
  double discrete_row_divergence;  // max-norm of the discrete row divergence of a
  Decomposition(const Grid& g) : v(g), a(g), B_residual(g) {}
};
Decomposition decompose(const Tensor2Field& C);

// Gaussian mollification (optional pre-smoothing for rough inputs).
ScalarField mollify(const ScalarField& f, double width);
Tensor2Field mollify(const Tensor2Field& f, double width);

// Pushforward linearization of the identity matrix under the flow of v:
// integrates Phi_t by RK4 (step t/64) with the variational equation,
// assembles I_t = det(DPhi)^{-1} DPhi^t DPhi, and fits the O(t^2) residual
// against the linearization sym grad v - delta div v, plus the determinant
// expansion det DPhi_t = 1 + t div v + O(t^2).
struct AnalyticVector {
  std::function<std::vector<double>(const std::vector<double>&)> value;
  std::function<std::vector<std::vector<double>>(const std::vector<double>&)> jacobian;
};
AnalyticVector bump_vector(const Grid& g, const std::vector<double>& amplitudes);

ExperimentReport tartar_linearization(const AnalyticVector& v, const Grid& g,
                                      const std::vector<double>& t_list,
                                      std::vector<std::vector<double>>* rows = nullptr);

}  // namespace hqm

#endif
