#ifndef HQM_GRID_HPP
#define HQM_GRID_HPP

#include <vector>

#include "hqm/errors.hpp"
#include "hqm/types.hpp"

namespace hqm {

// Uniform tensor-product box grid in R^{1+n}, coordinates labeled x0..xn.
//
// Non-periodic axes sample the closed interval [lo, hi] with res points,
// spacing (hi-lo)/(res-1). Periodic axes sample [lo, hi) with res points,
// spacing (hi-lo)/res; fields on them are understood as torus fields
// (extension-by-zero checks and one-sided stencils do not apply).
class Grid {
 public:
  Grid(std::vector<double> lo, std::vector<double> hi, std::vector<int> res,
       bool periodic = false)
      : lo_(std::move(lo)), hi_(std::move(hi)), res_(std::move(res)),
        periodic_(periodic) {
    require(lo_.size() == hi_.size() && lo_.size() == res_.size(),
            ErrorKind::InvalidGrid, "extent/resolution rank mismatch");
    require(dim() >= 2, ErrorKind::InvalidGrid, "grid dimension must be >= 2");
    for (int a = 0; a < dim(); ++a) {
      require(res_[a] >= 8, ErrorKind::InvalidGrid,
              "resolution must be >= 8 per axis");
      require(hi_[a] > lo_[a], ErrorKind::InvalidGrid, "degenerate extent");
    }
  }

  static Grid cube(int dim, double lo, double hi, int res, bool periodic = false) {
    return Grid(std::vector<double>(dim, lo), std::vector<double>(dim, hi),
                std::vector<int>(dim, res), periodic);
  }

  int dim() const { return static_cast<int>(res_.size()); }
  bool periodic() const { return periodic_; }
  int res(int axis) const { return res_[axis]; }
  const std::vector<int>& res() const { return res_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

  double spacing(int axis) const {
    return (hi_[axis] - lo_[axis]) /
           (periodic_ ? res_[axis] : res_[axis] - 1);
  }

  double coord(int axis, int i) const { return lo_[axis] + i * spacing(axis); }

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= hi_[a] - lo_[a];
    return v;
  }

  int64_t size() const {
    int64_t n = 1;
    for (int r : res_) n *= r;
    return n;
  }

  // Row-major linearization, axis 0 slowest.
  int64_t index(const std::vector<int>& idx) const {
    int64_t k = 0;
    for (int a = 0; a < dim(); ++a) k = k * res_[a] + idx[a];
    return k;
  }

  std::vector<int> unindex(int64_t k) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(k % res_[a]);
      k /= res_[a];
    }
    return idx;
  }

  std::vector<double> point(const std::vector<int>& idx) const {
    std::vector<double> x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = coord(a, idx[a]);
    return x;
  }

  // True when the sample lies within `collar` cells of any box face.
  bool in_collar(const std::vector<int>& idx, int collar) const {
    if (periodic_) return false;
    for (int a = 0; a < dim(); ++a)
      if (idx[a] < collar || idx[a] >= res_[a] - collar) return true;
    return false;
  }

  bool compatible(const Grid& o) const {
    return res_ == o.res_ && lo_ == o.lo_ && hi_ == o.hi_ &&
           periodic_ == o.periodic_;
  }

 private:
  std::vector<double> lo_, hi_;
  std::vector<int> res_;
  bool periodic_;
};

}  // namespace hqm

#endif
