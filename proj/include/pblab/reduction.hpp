#pragma once

#include "pblab/action.hpp"

namespace pblab {

struct ReducedPoint {
  LoopPoint full;              // low modes from the input, tail filled in
  double contraction_factor = 0.0;  // worst observed update ratio
  double tail_residual = 0.0;  // ||tail part of grad Phi|| at the fixed point
  int iterations = 0;
  bool converged = false;
};

// Lyapunov-Schmidt style tail solve: freeze the modes <= reduced_cutoff
// (plus the kernel and v) and iterate
//   g  <-  -L^{-1} (Id - pi) grad_e psi(f + g, v)
// on the tail modes.  L is an involution there, so L^{-1} = L.  Throws
// ReductionError when the observed update ratios are not contracting.
ReducedPoint reduce_tail(const ActionFunctional& af, const LoopPoint& low, int reduced_cutoff,
                         double tol = 1e-12, int max_iter = 200);

}  // namespace pblab
