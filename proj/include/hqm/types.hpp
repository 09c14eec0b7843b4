#ifndef HQM_TYPES_HPP
#define HQM_TYPES_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace hqm {

using Cx = std::complex<double>;
using std::int64_t;

inline constexpr Cx kImag{0.0, 1.0};

inline double sq(double x) { return x * x; }
inline Cx sq(Cx x) { return x * x; }

}  // namespace hqm

#endif
