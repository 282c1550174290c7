#pragma once

#include <string>
#include <vector>

#include "pblab/flow.hpp"
#include "pblab/sphere.hpp"

namespace pblab {

enum class RaySide { Inward, Outward };  // which radial ray is forbidden

struct RaySample {
  Vec x0;
  Vec y0;
  Vec theta;
  double margin = 0.0;  // dist(theta, forbidden ray) / max(|theta|, 1)
};

struct RaysReport {
  RaySide side = RaySide::Inward;
  bool verdict = false;
  bool verifiable = true;          // false when some solution failed to reach t = T
  std::string failure_note;
  double min_margin = 0.0;
  double max_margin = 0.0;
  int n_boundary = 0;
  int n_angles = 0;
  int n_interior = 0;
  std::vector<RaySample> worst;    // most marginal samples, ascending margin
};

struct RaysOptions {
  int n_boundary = 256;
  int n_angles = 8;
  int n_interior = 64;        // definedness probes with y(0) in int S
  double margin_tol = 1e-2;   // containment threshold on the normalised margin
  double integrator_tol = 1e-10;
  std::uint64_t seed = 42;
  int keep_worst = 16;
};

// Avoiding-rays test for the time-T displacement theta(x0, y0) = x(T) - x(0):
// passes when every sampled solution with y(0) in cl(int S) reaches t = T and
// theta stays clear of the forbidden radial ray through nu(y0).  Margins are
// normalised by max(|theta|, 1); a sample with margin <= margin_tol counts as
// a containment hit.  Integration failures make the result not verifiable --
// never a pass.
RaysReport check_avoiding_rays(const HamiltonianSystem& sys, const EmbeddedSphere& S, RaySide side,
                               const RaysOptions& opt = {});

}  // namespace pblab
