#ifndef HQM_PLANTS_HPP
#define HQM_PLANTS_HPP

#include <functional>
#include <vector>

#include "hqm/field.hpp"
#include "hqm/rng.hpp"

namespace hqm {

// Closed-form real scalar with exact gradient, used to plant test fields
// whose derivatives never pay finite-difference error.
struct AnalyticScalar {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
};

// Compactly supported product bump centered at `center` with per-axis
// radius; value 1 at the center, identically zero outside. alpha selects
// the profile family exp(1 - (1-t^2)^{-alpha}); larger alpha trades bigger
// derivatives for faster Fourier decay.
AnalyticScalar bump_scalar(std::vector<double> center, std::vector<double> radius,
                           int alpha = 1);

// Bump fitted to the grid box, shrunk to keep the support off the collar
// under refinement.
AnalyticScalar box_bump(const Grid& g, double shrink = 0.75, int alpha = 1);

// Band-limited real field on the torus: f = sum_m c_m e^{i k_m . x} over a
// Hermitian-symmetric mode set, with exact gradient and exact Fourier data.
class TrigPoly {
 public:
  TrigPoly(const Grid& g, std::vector<std::vector<int>> modes, std::vector<Cx> coeffs);

  // Random Hermitian mode set with |m|_inf <= mmax (zero mean).
  static TrigPoly random(const Grid& g, int mmax, Rng& rng, double amplitude = 1.0);

  double value(const std::vector<double>& x) const;
  std::vector<double> grad(const std::vector<double>& x) const;

  // Exact Fourier integral int f e^{-i xi . x} dx over the torus; nonzero
  // only when xi sits on the mode lattice of the stored set.
  Cx fourier(const std::vector<double>& xi) const;

  AnalyticScalar as_scalar() const;

 private:
  std::vector<double> wavevec(const std::vector<int>& m) const;
  Grid grid_;
  std::vector<std::vector<int>> modes_;
  std::vector<Cx> coeffs_;
};

ScalarField sample_scalar(const Grid& g, const AnalyticScalar& f);

// Tensor plants.
// Structure tensor B_jkl = b_j delta_kl - b_k delta_jl from an analytic
// vector b (a scalar profile times a direction, or per-component scalars).
Tensor3Field plant_structure(const Grid& g, const std::vector<AnalyticScalar>& b);
// Levi-Civita density eps_jkl * f(x) (dim 3 grids).
Tensor3Field plant_levi_civita(const Grid& g, const AnalyticScalar& f);
// Fully antisymmetric part generator: eps_jkl * f plus a structure tensor.
Tensor3Field add(const Tensor3Field& a, const Tensor3Field& b);
Tensor3Field scale(const Tensor3Field& a, Cx c);

}  // namespace hqm

#endif
