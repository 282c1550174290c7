#pragma once

#include <vector>

#include "pblab/action.hpp"

namespace pblab {

struct CriticalPoint {
  LoopPoint p;            // v reduced to [0, 2 pi)^N
  double residual = 0.0;  // ||grad Phi||
  double value = 0.0;     // Phi at the point
  int newton_iters = 0;
};

struct SearchOptions {
  int budget = 200;          // number of seeds
  double newton_tol = 1e-10;
  int max_newton_iter = 40;
  double seed_scale = 0.3;   // gaussian e amplitude for random seeds
  double dedup_tol = 1e-6;   // torus-aware distance below which points merge
  std::uint64_t seed = 42;
};

// Multistart damped Newton on grad Phi = 0 with deflation against the
// points already found.  Seeds: caller hints, the half-period lattice
// {0, pi}^N, a uniform torus grid, then random loops.  Seeds are processed
// in deterministic batches; results do not depend on the worker count.
std::vector<CriticalPoint> find_critical_points(const ActionFunctional& af,
                                                const SearchOptions& opt = {},
                                                const std::vector<LoopPoint>& hints = {});

}  // namespace pblab
