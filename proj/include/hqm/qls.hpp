#ifndef HQM_QLS_HPP
#define HQM_QLS_HPP

#include <array>
#include <vector>

#include "hqm/field.hpp"
#include "hqm/harmonic.hpp"
#include "hqm/report.hpp"

namespace hqm {

// Coefficients of the coupled quasilinear system
//
//   -Lap u^J + sum_K div( A^{JK} : grad u^J (x) grad u^K ) = 0,  J = 1,2,
//   (u^1, u^2)|_boundary = eps (f^1, f^2),
//
// where the divergence contracts the first tensor index (the reading
// consistent with the integration-by-parts pairing). The A^{JJ} are
// symmetric in their last two indices; every A^{JK} is compactly supported
// in the grid interior, which legitimizes the volume-form DtN pairing.
class CoupledTensors {
 public:
  explicit CoupledTensors(const Grid& g)
      : A_{Tensor3Field(g), Tensor3Field(g), Tensor3Field(g), Tensor3Field(g)} {}

  Tensor3Field& at(int J, int K) { return A_[(J - 1) * 2 + (K - 1)]; }
  const Tensor3Field& at(int J, int K) const { return A_[(J - 1) * 2 + (K - 1)]; }
  const Grid& grid() const { return A_[0].grid(); }

  // Diagonal symmetry + compact support invariants.
  void validate() const;

 private:
  std::array<Tensor3Field, 4> A_;
};

// Dirichlet data carried by its harmonic extension (analytically harmonic).
struct BoundaryData {
  HarmonicFn f1, f2;
};

struct ForwardSolution {
  ScalarField u1, u2;
  std::vector<double> residual_history;  // discrete H1 update norms
  double epsilon = 0.0;
  double contraction_ratio = 0.0;  // geometric ratio estimated from the tail
  ForwardSolution(const Grid& g) : u1(g), u2(g) {}
  const ScalarField& u(int J) const { return J == 1 ? u1 : u2; }
};

// Fixed-point solve of the system by the contraction map
//   T(v)^J = eps v0^J - G0( sum_K div (A^{JK} : grad v^J (x) grad v^K) ).
// Divergence is detected (three consecutive growing residuals), not assumed.
ForwardSolution solve_forward(const CoupledTensors& A, const BoundaryData& data,
                              double epsilon, double tol, int max_iter = 60);

// Weak DtN pairing <n . grad u^J, w> computed through the divergence-theorem
// volume form int grad u^J . grad w - sum_K int (A^{JK} : grad u^J (x) grad u^K) . grad w
// (valid because A vanishes near the boundary; no boundary differentiation).
std::array<Cx, 2> dtn_pair(const CoupledTensors& A, const BoundaryData& data,
                           double epsilon, const HarmonicFn& w);

// Least-squares fit of <Lambda>^J over an epsilon sweep to
// c1 eps + c2 eps^2 + c3 eps^3; returns c2 per component with a
// Richardson-style error estimate (refit without the largest epsilon).
struct SecondLinearization {
  std::array<Cx, 2> c1;  // linear coefficient (kept for symmetry diagnostics)
  std::array<Cx, 2> c2;
  std::array<double, 2> error_estimate;
};
SecondLinearization second_linearization(const CoupledTensors& A,
                                         const BoundaryData& data, const HarmonicFn& w,
                                         const std::vector<double>& eps_list,
                                         double tol = 1e-12);

// Direct moment oracle sum_K int A^{JK} : grad w (x) grad v0^J (x) grad v0^K dx.
std::array<Cx, 2> moment_oracle(const CoupledTensors& A, const BoundaryData& data,
                                const HarmonicFn& w);

// Second corrector v1^J = -G0( sum_K div (A^{JK} : grad v0^J (x) grad v0^K) ).
std::array<ScalarField, 2> second_corrector(const CoupledTensors& A,
                                            const BoundaryData& data);

// Dictionary comparison of extracted second-linearization moments for two
// coefficient sets: reports the maximum moment gap and the fit-noise scale.
struct UniquenessResult {
  double max_gap = 0.0;
  double fit_noise = 0.0;
  bool coverage_warning = false;  // dictionary smaller than 10 triples
  std::vector<std::vector<double>> rows;  // triple index, gap, per-component gaps
};
UniquenessResult uniqueness_experiment(
    const CoupledTensors& A, const CoupledTensors& A_tilde,
    const std::vector<std::array<HarmonicFn, 3>>& dictionary,
    const std::vector<double>& eps_list);

// Standard smooth compactly supported coefficient plant used by tests and
// experiments: structure-flavored symmetric diagonal blocks plus generic
// off-diagonals, all scaled by `amp`.
CoupledTensors planted_coupled_tensors(const Grid& g, double amp = 1.0);

}  // namespace hqm

#endif
