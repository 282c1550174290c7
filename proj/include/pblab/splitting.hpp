#pragma once

#include "pblab/loop_space.hpp"

namespace pblab {

// Spectral decomposition of the loop-space symplectic form
//   B(z, w) = int_0^1 <J z', w> dt
// restricted to the truncated basis.  With the weighted basis the assembled
// matrix is an involution plus an N-dimensional kernel (the y-means), so the
// renormalised operator L = proj_plus - proj_minus coincides with the raw
// form to round-off.
struct SpectralSplitting {
  Mat L;            // renormalised operator on the e-coordinates
  Mat proj_plus, proj_minus, proj_zero;
  Vec eigenvalues;  // raw spectrum, ascending
  double eps0 = 0.0;  // definiteness gap: min |nonzero eigenvalue|
  int dim_plus = 0, dim_minus = 0, dim_zero = 0;
  double renorm_defect = 0.0;  // ||L_raw - (proj_plus - proj_minus)||_inf
};

SpectralSplitting build_splitting(const TruncatedLoopSpace& space);

// Raw assembly of B on the e-basis; exposed for cross-checking against
// quadrature in the tests.
Mat assemble_symplectic_form(const TruncatedLoopSpace& space);

}  // namespace pblab
