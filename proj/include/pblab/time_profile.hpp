#pragma once

#include "pblab/basket.hpp"

namespace pblab {

// Time-localised forcing profile r(t, eta) built over a basket function h:
//
//   r(t, eta) = h(eta) * [ (1 - chi(|eta|)) b(t) + chi(|eta|) ]
//
// where b is a C2 bump supported on [0, tau] with unit average over [0, T]
// and chi ramps from 0 (|eta| <= big_r) to 1 (|eta| >= r0).  By construction
//   - r vanishes outside ([0,tau] x cl(ext S)) union ([0,T] x {|eta| > big_r}),
//   - the t-average of r equals h(eta) for every eta (exactly),
//   - r(t, eta) = h(eta) for |eta| >= r0.
struct TimeProfile {
  BasketFunction basket;
  double period = 1.0;
  double tau = 0.25;    // support of the bump in t
  double big_r = 0.0;   // radius enclosing S
  double r0 = 0.0;      // saturation radius (> big_r)

  double bump_t(double t) const;        // b(t), unit average over [0, period]
  double radial_blend(double rho) const;  // chi(|eta|)
  double eval(double t, const Vec& eta) const;
};

TimeProfile build_time_profile(const BasketFunction& basket, double period, double tau,
                               double big_r, double r0);

struct TimeProfileReport {
  double support_defect = 0.0;   // max |r| sampled off the allowed support set
  double average_defect = 0.0;   // max |mean_t r - h(eta)| over the eta grid
  double saturation_defect = 0.0;  // max |r - h| for |eta| >= r0
  bool pass = false;
};

// Quadrature verification on an (eta-radius x t) grid; the t-average uses
// composite Gauss-Legendre so polynomial bumps integrate to round-off.
TimeProfileReport verify_time_profile(const TimeProfile& profile, int n_radii = 64, int n_t = 64,
                                      double tol = 1e-8, int n_directions = 16,
                                      std::uint64_t seed = 7);

}  // namespace pblab
