#ifndef HQM_IO_HPP
#define HQM_IO_HPP

#include <string>

#include "hqm/field.hpp"

namespace hqm {

// Flat binary field layout: little-endian header
//   u64 dim, u64 rank, u64 res[dim], f64 (lo, hi)[dim]
// followed by row-major complex f64 samples, components outermost for
// tensor ranks. A JSON metadata sidecar is written next to the binary
// (path + ".json") carrying the same header plus the periodic flag.
void save_field(const std::string& path, const ScalarField& f);
void save_field(const std::string& path, const Tensor3Field& f);

ScalarField load_scalar_field(const std::string& path);
Tensor3Field load_tensor3_field(const std::string& path);

}  // namespace hqm

#endif
