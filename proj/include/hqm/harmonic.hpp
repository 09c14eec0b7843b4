#ifndef HQM_HARMONIC_HPP
#define HQM_HARMONIC_HPP

#include <functional>
#include <string>
#include <vector>

#include "hqm/field.hpp"
#include "hqm/types.hpp"

namespace hqm {

// Closed-form evaluator bundle for an analytically harmonic function:
// value, exact gradient, and the (analytically zero) Laplacian retained
// for verification. Bundles are immutable and shareable across threads.
struct HarmonicFn {
  int dim = 0;
  std::string descriptor;
  std::function<Cx(const std::vector<double>&)> value;
  std::function<std::vector<Cx>(const std::vector<double>&)> grad;
  std::function<Cx(const std::vector<double>&)> lap;
};

// Calderon exponential data: xi and a unit normal nu orthogonal to it,
// with zeta_pm = (xi -+/+ i|xi| nu)/2. Satisfies zeta.zeta = 0 and
// zeta_plus + zeta_minus = xi up to round-off.
struct CalderonPair {
  std::vector<double> xi;
  std::vector<double> nu;
  std::vector<Cx> zeta_plus;
  std::vector<Cx> zeta_minus;
};

// Build the pair; rejects non-orthogonal or non-unit nu (no silent
// re-normalization).
CalderonPair calderon_pair(const std::vector<double>& xi,
                           const std::vector<double>& nu);

// e^{i zeta . x} for a null complex vector zeta (zeta.zeta = 0 within 1e-12).
HarmonicFn calderon_wave(const std::vector<Cx>& zeta);

// Constant, coordinate and point-source families.
HarmonicFn constant_fn(int dim, Cx value = Cx{1.0, 0.0});
HarmonicFn coordinate_fn(int dim, int axis);

// |z - x|^{2-dim} for dim >= 3 (log|z - x| in dim 2). The pole must lie
// outside `box_lo`..`box_hi`, the bounding box fields will be sampled on.
HarmonicFn point_source(const std::vector<double>& pole,
                        const std::vector<double>& box_lo,
                        const std::vector<double>& box_hi);

// Basis of real harmonic polynomials of every degree <= max_degree
// (degree 0 constant included), each with exact gradient and zero
// Laplacian. Deterministic ordering.
std::vector<HarmonicFn> harmonic_polynomials(int max_degree, int dim);

// Dimension count of homogeneous harmonic polynomials of exact degree d.
int harmonic_polynomial_count(int degree, int dim);

// Max over interior grid points of |discrete Laplacian of f| / max|f|.
double harmonicity_residual(const HarmonicFn& f, const Grid& g);

// Sampling helpers.
ScalarField sample(const HarmonicFn& f, const Grid& g);
VectorField sample_gradient(const HarmonicFn& f, const Grid& g);

// Descriptor round-trip (CLI config format), e.g.
//   kind=calderon;sign=+;factor=1;xi=2,0,0;nu=0,1,0
HarmonicFn parse_harmonic(const std::string& descriptor);

}  // namespace hqm

#endif
