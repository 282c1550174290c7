#pragma once

#include "pblab/hamiltonian.hpp"
#include "pblab/loop_space.hpp"
#include "pblab/splitting.hpp"

namespace pblab {

// Renormalised action functional on the truncated loop space:
//   Phi(e, v) = 1/2 <L e, e> + int_0^1 H1(t, z(t)) dt
// where H1(t, z) = T * H(t*T, z) is the Hamiltonian rescaled to unit period
// and the integral is the trapezoid sum over the quadrature nodes.  Critical
// points correspond to T-periodic solutions of the original system.
class ActionFunctional {
 public:
  ActionFunctional(const HamiltonianSystem& sys, const TruncatedLoopSpace& space,
                   const SpectralSplitting& splitting);

  const TruncatedLoopSpace& space() const { return space_; }
  const SpectralSplitting& splitting() const { return split_; }
  const HamiltonianSystem& system() const { return sys_; }

  double value(const LoopPoint& p) const;

  // Gradient in the (e, v) coordinates, length dim_total().
  Vec gradient(const LoopPoint& p) const;

  // Gradient of the nonlinear part only (no L e term).
  Vec psi_gradient(const LoopPoint& p) const;

  // Dense Hessian in (e, v); uses the analytic Hessian of H when available,
  // otherwise finite differences of the nodewise gradient.
  Mat hessian(const LoopPoint& p) const;

  // Initial condition of the loop: z(0).
  Vec loop_start(const LoopPoint& p) const { return space_.value_at(p.e, p.v, 0.0); }

 private:
  void node_gradients(const LoopPoint& p, Mat& G) const;  // n_nodes x 2N

  const HamiltonianSystem& sys_;
  const TruncatedLoopSpace& space_;
  const SpectralSplitting& split_;
};

}  // namespace pblab
