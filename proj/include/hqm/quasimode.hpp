#ifndef HQM_QUASIMODE_HPP
#define HQM_QUASIMODE_HPP

#include <vector>

#include "hqm/field.hpp"
#include "hqm/harmonic.hpp"
#include "hqm/laurent.hpp"
#include "hqm/report.hpp"

namespace hqm {

// Free data of the Gaussian quasi-mode construction
//
//   u_tau(x) = e^{sign tau x0} e^{i tau Psi(x1,x2)} a_tau(x1,x2),
//   Psi = sum_j psi_j(x1) x2^j,
//   a_tau = chi(x2/delta) h(x''') sum_k v_k(x1,x2) tau^{-k},
//
// with tau = lambda + i sigma. The remainder term that would make u_tau
// exactly harmonic is not constructed; verification targets the conjugated
// operator residual instead.
struct QuasimodeParams {
  double lambda = 100.0;
  double sigma = 0.0;
  double eps = 0.5;
  double delta = 0.25;
  int M = 4;
  Cx p3{0, 0}, p4{0, 0}, p5{0, 0};
  Cx q1{0, 0};
  HarmonicFn transverse;  // factor h on the x''' variables; constant 1 when dim == 3
  int sign = +1;
  double x1_lo = 0.5, x1_hi = 2.0;  // working x1-interval, must stay positive

  Cx tau() const { return {lambda, sigma}; }
  void validate() const;
};

// Phase coefficients psi_0..psi_M. psi_0 = x1, psi_1 = 0, psi_2..psi_5 follow
// the closed forms (with free constants p3, p4, p5); higher orders solve the
// eikonal-condition ODEs in the zero-integration-constant gauge.
struct PhaseHierarchy {
  int M = 0;
  double eps = 0.0;
  std::vector<LaurentPoly> psi;

  Cx psi_at(int j, double x1) const { return psi[j].eval(x1, eps); }
  Cx Psi(double x1, double x2) const;       // full truncated phase
  Cx dPsi_dx1(double x1, double x2) const;
  Cx dPsi_dx2(double x1, double x2) const;
  double kappa(double x1_lo, double x1_hi) const;  // min Im psi_2 on the range
};

// Amplitude coefficients v_{k;j}, j <= M - 2k (the transport ODE for v_{k;j}
// consumes v_{k-1;j+2}, which fixes the triangular budget). v_{0;0} and
// v_{0;1} follow the closed forms (free constant q1); the rest integrate the
// transport conditions in the zero-constant gauge.
struct AmplitudeHierarchy {
  int M = 0;
  double eps = 0.0;
  std::vector<std::vector<LaurentPoly>> v;  // v[k][j]

  int budget(int k) const { return M - 2 * k; }
  int levels() const { return static_cast<int>(v.size()); }
  Cx v_at(int k, int j, double x1) const { return v[k][j].eval(x1, eps); }
};

PhaseHierarchy build_phase(const QuasimodeParams& params);
AmplitudeHierarchy build_amplitude(const QuasimodeParams& params,
                                   const PhaseHierarchy& phase);

// Residuals of the defining conditions at x2 = 0, order by order; all are
// ~round-off for constructed hierarchies. Order m of `eikonal` is the
// x2^m coefficient of |grad' Psi|^2 - 1; order m of `transport[k]` is the
// x2^m coefficient of 2 grad'Psi.grad' v_k + (Lap' Psi) v_k - i Lap' v_{k-1}.
struct ConditionResiduals {
  std::vector<double> eikonal;
  std::vector<std::vector<double>> transport;
  double max_residual = 0.0;
};
ConditionResiduals condition_residuals(const QuasimodeParams& params,
                                       const PhaseHierarchy& phase,
                                       const AmplitudeHierarchy& ampl,
                                       int n_x1_samples = 9);

// Leading-part quasi-mode value and closed-form gradient at a point
// (exact zero outside the cutoff support).
struct QuasimodeValue {
  Cx value;
  std::vector<Cx> grad;
};
QuasimodeValue eval_quasimode(const QuasimodeParams& params,
                              const PhaseHierarchy& phase,
                              const AmplitudeHierarchy& ampl,
                              const std::vector<double>& x);

// Conjugated-operator residual diagnostics: per-bracket orders of vanishing
// in x2 (slope fits on a dyadic ladder) and the decay order in lambda of the
// total residual over a fixed x2-window.
struct ResidualOptions {
  std::vector<double> x2_ladder;   // >= 5 points required
  std::vector<double> lambdas;     // >= 4 points required
  double window = 0.0;             // x2 half-width for the lambda sweep; 0 = delta/2
};
ResidualOptions default_residual_options(const QuasimodeParams& params);

struct ResidualTables {
  std::vector<std::vector<double>> x2_rows;      // x2, |eikonal|, |transport_0|
  std::vector<std::vector<double>> lambda_rows;  // lambda, residual_l1
};

ExperimentReport conjugated_residual(const QuasimodeParams& params,
                                     const PhaseHierarchy& phase,
                                     const AmplitudeHierarchy& ampl,
                                     const Grid& grid,
                                     const ResidualOptions& options,
                                     ResidualTables* tables = nullptr);

}  // namespace hqm

#endif
