#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pblab/rng.hpp"
#include "pblab/types.hpp"

namespace pblab {

// Embedded (N-1)-sphere in momentum space, given as the zero set of a
// defining function f with f < 0 inside, f > 0 outside and grad f != 0 on
// a neighbourhood of the zero set.  For N = 1 the "sphere" is a two-point
// set and int S an interval.
struct EmbeddedSphere {
  int dim = 2;  // ambient N
  std::string name;
  double bounding_radius = 1.0;  // S is contained in this ball around center_hint
  Vec center_hint;               // a point of int S, used for ray casting

  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> f_grad;
  std::function<Mat(const Vec&)> f_hess;  // may be empty

  bool has_hessian() const { return static_cast<bool>(f_hess); }

  bool inside(const Vec& y) const { return f(y) < 0.0; }

  // Outward unit normal grad f / |grad f|; throws if the gradient is
  // numerically degenerate at y.
  Vec normal(const Vec& y) const {
    Vec g = f_grad(y);
    const double m = g.norm();
    if (!(m > 1e-12)) throw EvaluationError("defining gradient vanishes near the sphere");
    return g / m;
  }
};

EmbeddedSphere builtin_sphere(const std::string& name, const std::map<std::string, double>& params);

// Root of s -> f(center + s*u) - level on (0, inf); the builtin spheres are
// star-shaped about center_hint with f increasing outward, so this is well
// defined for level >= 0.
Vec cast_to_level(const EmbeddedSphere& S, const Vec& direction, double level);

inline Vec cast_to_boundary(const EmbeddedSphere& S, const Vec& direction) {
  return cast_to_level(S, direction, 0.0);
}

// n quasi-uniform boundary points.  N=1: the two endpoints; N=2: uniform in
// arclength (computed from a fine polygon); N>=3: deterministic pseudo-random
// directions projected onto S.
std::vector<Vec> sample_boundary(const EmbeddedSphere& S, int n, std::uint64_t seed = 12345);

// Rejection sampling of int S inside the bounding box.
std::vector<Vec> sample_interior(const EmbeddedSphere& S, int n, std::uint64_t seed = 54321);

// min distance from p to the ray { lambda*u : lambda >= 0 }, |u| = 1.
inline double ray_distance(const Vec& p, const Vec& u) {
  const double along = p.dot(u);
  if (along <= 0.0) return p.norm();
  return (p - along * u).norm();
}

}  // namespace pblab
