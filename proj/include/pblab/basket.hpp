#pragma once

#include <functional>
#include <vector>

#include "pblab/sphere.hpp"
#include "pblab/types.hpp"

namespace pblab {

// Radial profile g applied to the defining function: h = g(f(y)).
// The constructed profile is piecewise analytic:
//   r <= 0       g = 0
//   0 < r < 1    g' = a polynomial blend that rises from 0
//   r >= 1       g'(r) = kappa (1+r)^(-q)   (so g -> 1 with a power tail)
// and is C2 across both junctions.  Tests may substitute their own value/d1/d2
// to plant defects.
struct RadialProfile {
  std::function<double(double)> value, d1, d2;
  double kappa = 0.0, q = 0.0;     // tail shape
  double env_a = 0.0, env_p = 0.0; // fitted envelope m_hat(r) = A (1+r)^p
};

struct BasketGridRow {
  double r = 0.0;        // level of the defining function
  double m_sampled = 0.0;  // (r+1) * max sampled (|grad f| + ||Hess f||) on S_r
  double m_env = 0.0;      // power-law majorant at r
  double g = 0.0, g1 = 0.0, g2 = 0.0;
};

struct BasketFunction {
  EmbeddedSphere S;
  RadialProfile profile;
  std::vector<BasketGridRow> grid;  // construction grid, ascending r

  double eval(const Vec& y) const {
    const double r = S.f(y);
    return r <= 0.0 ? 0.0 : profile.value(r);
  }
  Vec grad(const Vec& y) const {
    const double r = S.f(y);
    if (r <= 0.0) return Vec::Zero(y.size());
    return Vec(profile.d1(r) * S.f_grad(y));
  }
  Mat hess(const Vec& y) const {
    const double r = S.f(y);
    if (r <= 0.0) return Mat::Zero(y.size(), y.size());
    const Vec g = S.f_grad(y);
    return Mat(profile.d2(r) * (g * g.transpose()) + profile.d1(r) * S.f_hess(y));
  }
};

struct BasketBuildOptions {
  int n_levels = 48;        // construction grid size (log-spaced)
  int n_directions = 64;    // ray directions used to sample the level sets
  double safety = 1.5;      // envelope headroom over the sampled maxima
  double far_radius_factor = 150.0;  // how far out the grid reaches
  std::uint64_t seed = 2024;
};

// Builds h = g(f) where g is pinched by the derivative budget
// -1/m_hat^2 < g'' < 0 < g' < 1/m_hat for r >= 1 (m_hat the sampled-envelope
// majorant of the level-set derivative bound).  Requires the sphere Hessian.
BasketFunction build_basket(const EmbeddedSphere& S, const BasketBuildOptions& opt = {});

struct AxiomCheck {
  bool pass = false;
  double worst = 0.0;     // worst observed margin/defect for the axiom
  Vec witness;            // sample realising it (empty if pass)
  std::string note;
};

struct BasketReport {
  AxiomCheck vanish_inside;    // h = 0, grad h = 0 on int S
  AxiomCheck grad_nonzero;     // grad h != 0 on ext S
  AxiomCheck collar_normal;    // grad h / |grad h| approaches the outward normal at S
  AxiomCheck saturates;        // h -> 1, grad h -> 0, Hess h -> 0 far out
  bool derivative_budget = false;  // g-inequalities on the construction grid, r >= 1
  double budget_worst_slack = 0.0;
  bool verdict = false;
};

struct BasketVerifyOptions {
  double tol = 1e-3;        // axioms (a)-(c)
  double tail_tol = 1e-2;   // axiom (d) at far_factor * bounding_radius
  double far_factor = 100.0;
  double collar_delta = 1e-5;  // collar offset, in units of bounding_radius
  int n_interior = 200;
  int n_boundary = 64;
  int n_far_directions = 16;
  std::uint64_t seed = 99;
};

BasketReport verify_basket(const BasketFunction& basket, const BasketVerifyOptions& opt = {});

}  // namespace pblab
