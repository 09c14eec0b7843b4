#ifndef HQM_FIELD_HPP
#define HQM_FIELD_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "hqm/grid.hpp"
#include "hqm/types.hpp"

namespace hqm {

// Complex-valued sampled field on a Grid. All fields are complex even when
// the underlying object is real: quasi-modes and Calderon waves are
// intrinsically complex.
class ScalarField {
 public:
  explicit ScalarField(Grid grid)
      : grid_(std::move(grid)), v_(grid_.size(), Cx{0.0, 0.0}) {}

  const Grid& grid() const { return grid_; }
  int64_t size() const { return static_cast<int64_t>(v_.size()); }

  Cx& operator[](int64_t k) { return v_[k]; }
  const Cx& operator[](int64_t k) const { return v_[k]; }
  std::vector<Cx>& data() { return v_; }
  const std::vector<Cx>& data() const { return v_; }

  Cx& at(const std::vector<int>& idx) { return v_[grid_.index(idx)]; }
  const Cx& at(const std::vector<int>& idx) const { return v_[grid_.index(idx)]; }

  // Pointwise fill from a callable of the physical coordinates.
  void fill(const std::function<Cx(const std::vector<double>&)>& f);

  bool finite() const;
  double max_abs() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(Cx c);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(Cx c, ScalarField a) { return a *= c; }

 private:
  Grid grid_;
  std::vector<Cx> v_;
};

// Rank-1/2/3 analogues hold one ScalarField per tensor slot, indices in
// 0..dim-1 each.
class VectorField {
 public:
  explicit VectorField(const Grid& grid)
      : grid_(grid), comp_(grid.dim(), ScalarField(grid)) {}

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  ScalarField& comp(int j) { return comp_[j]; }
  const ScalarField& comp(int j) const { return comp_[j]; }
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<ScalarField> comp_;
};

class Tensor2Field {
 public:
  explicit Tensor2Field(const Grid& grid)
      : grid_(grid), comp_(grid.dim() * grid.dim(), ScalarField(grid)) {}

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  ScalarField& comp(int j, int k) { return comp_[j * dim() + k]; }
  const ScalarField& comp(int j, int k) const { return comp_[j * dim() + k]; }
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<ScalarField> comp_;
};

class Tensor3Field {
 public:
  explicit Tensor3Field(const Grid& grid)
      : grid_(grid), comp_(grid.dim() * grid.dim() * grid.dim(), ScalarField(grid)) {}

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  ScalarField& comp(int j, int k, int l) {
    return comp_[(j * dim() + k) * dim() + l];
  }
  const ScalarField& comp(int j, int k, int l) const {
    return comp_[(j * dim() + k) * dim() + l];
  }
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<ScalarField> comp_;
};

// Compact support check: values vanish on a boundary collar of `collar`
// cells. Periodic grids are torus fields and pass trivially.
bool vanishes_on_collar(const ScalarField& f, int collar, double tol = 0.0);
bool vanishes_on_collar(const Tensor2Field& f, int collar, double tol = 0.0);
bool vanishes_on_collar(const Tensor3Field& f, int collar, double tol = 0.0);

}  // namespace hqm

#endif
