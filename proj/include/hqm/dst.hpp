#ifndef HQM_DST_HPP
#define HQM_DST_HPP

#include "hqm/field.hpp"

namespace hqm {

// Dirichlet Green operator G0 on the box: returns u with Laplacian(u) = source
// and u = 0 on the box boundary. Diagonalizes through the sine basis
// sin(pi k (x-lo)/L) per axis, dividing by the analytic eigenvalues
// -sum (pi k / L)^2; exact for sources that are finite sine series.
ScalarField green_dirichlet(const ScalarField& source);

}  // namespace hqm

#endif
