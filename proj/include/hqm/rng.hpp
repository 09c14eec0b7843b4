#ifndef HQM_RNG_HPP
#define HQM_RNG_HPP

#include <random>
#include <vector>

#include "hqm/types.hpp"

namespace hqm {

// Seeded RNG wrapper. Every experiment threads one of these explicitly so
// runs are reproducible from the config seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }
  Cx complex_in_disk(double radius) {
    while (true) {
      const double re = uniform(-radius, radius);
      const double im = uniform(-radius, radius);
      if (re * re + im * im <= radius * radius) return {re, im};
    }
  }
  std::vector<double> unit_vector(int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(dim);
    double s = 0.0;
    do {
      s = 0.0;
      for (double& x : v) { x = n(eng_); s += x * x; }
    } while (s < 1e-12);
    s = std::sqrt(s);
    for (double& x : v) x /= s;
    return v;
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hqm

#endif
