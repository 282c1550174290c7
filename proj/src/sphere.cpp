#include "pblab/sphere.hpp"

#include <cmath>

namespace pblab {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

EmbeddedSphere round_sphere(int n, double radius) {
  EmbeddedSphere S;
  S.dim = n;
  S.name = "unit-sphere";
  S.bounding_radius = radius;
  S.center_hint = Vec::Zero(n);
  const double r2 = radius * radius;
  S.f = [r2](const Vec& y) { return y.squaredNorm() - r2; };
  S.f_grad = [](const Vec& y) { return Vec(2.0 * y); };
  S.f_hess = [n](const Vec&) { return Mat(2.0 * Mat::Identity(n, n)); };
  return S;
}

EmbeddedSphere ellipse_sphere(const Vec& axes) {
  const int n = static_cast<int>(axes.size());
  EmbeddedSphere S;
  S.dim = n;
  S.name = "ellipse";
  S.bounding_radius = axes.maxCoeff();
  S.center_hint = Vec::Zero(n);
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    if (axes[i] <= 0) throw ConstructionError("ellipse semi-axes must be positive");
    w[i] = 1.0 / (axes[i] * axes[i]);
  }
  S.f = [w](const Vec& y) { return (y.array().square() * w.array()).sum() - 1.0; };
  S.f_grad = [w](const Vec& y) { return Vec(2.0 * w.array() * y.array()); };
  S.f_hess = [w, n](const Vec&) { return Mat(2.0 * w.asDiagonal()); };
  return S;
}

// Polar star curve r = b + a*cos(m*phi) in the plane, f = |y| - r(phi).
// Needs b > a*(1 + m^2)... no: b > a and b - a*m^2 may go negative, which is
// fine for f as long as r > 0; gradient stays nonzero since the radial
// component of grad f is 1.
EmbeddedSphere star_curve(double base, double amp, int lobes) {
  if (base <= std::abs(amp)) throw ConstructionError("star curve needs base radius > |amplitude|");
  EmbeddedSphere S;
  S.dim = 2;
  S.name = "star-3-lobe";
  S.bounding_radius = base + std::abs(amp);
  S.center_hint = Vec::Zero(2);
  const double m = lobes;

  auto R = [base, amp, m](double phi) { return base + amp * std::cos(m * phi); };
  auto Rp = [amp, m](double phi) { return -amp * m * std::sin(m * phi); };
  auto Rpp = [amp, m](double phi) { return -amp * m * m * std::cos(m * phi); };

  S.f = [R](const Vec& y) {
    const double s = y.norm();
    const double phi = std::atan2(y[1], y[0]);
    return s - R(phi);
  };
  S.f_grad = [Rp](const Vec& y) {
    const double s = y.norm();
    if (s < 1e-12) throw EvaluationError("star curve gradient undefined at the origin");
    const double phi = std::atan2(y[1], y[0]);
    const Vec u = y / s;                      // radial
    Vec v(2);
    v << -u[1], u[0];                         // tangential
    return Vec(u - (Rp(phi) / s) * v);
  };
  S.f_hess = [Rp, Rpp](const Vec& y) {
    const double s = y.norm();
    if (s < 1e-12) throw EvaluationError("star curve Hessian undefined at the origin");
    const double phi = std::atan2(y[1], y[0]);
    const Vec u = y / s;
    Vec v(2);
    v << -u[1], u[0];
    // f = s - R(phi): Hess s = v v^T / s, grad phi = v / s,
    // Hess phi = -(u v^T + v u^T)/s^2
    Mat h = (v * v.transpose()) / s;
    h -= Rpp(phi) * (v * v.transpose()) / (s * s);
    h += Rp(phi) * (u * v.transpose() + v * u.transpose()) / (s * s);
    return h;
  };
  return S;
}

}  // namespace

EmbeddedSphere builtin_sphere(const std::string& name, const std::map<std::string, double>& params) {
  const int n = static_cast<int>(get_param(params, "n", 2));
  if (name == "unit-sphere") {
    return round_sphere(n, get_param(params, "radius", 1.0));
  }
  if (name == "ellipse") {
    Vec axes(n);
    for (int i = 0; i < n; ++i) {
      auto it = params.find("axis" + std::to_string(i));
      axes[i] = it == params.end() ? 1.0 : it->second;
    }
    return ellipse_sphere(axes);
  }
  if (name == "star-3-lobe") {
    return star_curve(get_param(params, "base_radius", 0.6), get_param(params, "lobe_amplitude", 0.25),
                      static_cast<int>(get_param(params, "lobes", 3)));
  }
  throw ConstructionError("unknown sphere '" + name + "'");
}

Vec cast_to_level(const EmbeddedSphere& S, const Vec& direction, double level) {
  const Vec u = direction / direction.norm();
  const Vec& c = S.center_hint;
  if (!(S.f(c) < level)) throw ConstructionError("level cast must start below the target level");
  double lo = 0.0, hi = 2.0 * S.bounding_radius;
  double fhi = S.f(c + hi * u);
  int guard = 0;
  while (fhi < level && ++guard < 60) {
    hi *= 2;
    fhi = S.f(c + hi * u);
  }
  if (fhi < level) throw ConstructionError("level cast failed to bracket the target level");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (S.f(c + mid * u) < level)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
  }
  double s = 0.5 * (lo + hi);
  // Newton polish on the section
  for (int it = 0; it < 4; ++it) {
    Vec p = c + s * u;
    const double df = S.f_grad(p).dot(u);
    if (std::abs(df) < 1e-14) break;
    s -= (S.f(p) - level) / df;
  }
  return c + s * u;
}

std::vector<Vec> sample_boundary(const EmbeddedSphere& S, int n, std::uint64_t seed) {
  std::vector<Vec> pts;
  pts.reserve(n);
  if (S.dim == 1) {
    // the boundary is just the two endpoints; n only caps the count
    Vec up(1), dn(1);
    up << 1.0;
    dn << -1.0;
    pts.push_back(cast_to_boundary(S, dn));
    if (n > 1) pts.push_back(cast_to_boundary(S, up));
    return pts;
  }
  if (S.dim == 2) {
    // fine polygon -> cumulative arclength -> uniform resampling
    const int fine = std::max(16 * n, 4096);
    std::vector<Vec> poly(fine + 1);
    for (int i = 0; i <= fine; ++i) {
      const double phi = two_pi * i / fine;
      Vec u(2);
      u << std::cos(phi), std::sin(phi);
      poly[i] = cast_to_boundary(S, u);
    }
    std::vector<double> arc(fine + 1, 0.0);
    for (int i = 1; i <= fine; ++i) arc[i] = arc[i - 1] + (poly[i] - poly[i - 1]).norm();
    const double total = arc[fine];
    int seg = 0;
    for (int j = 0; j < n; ++j) {
      const double target = total * j / n;
      while (seg < fine && arc[seg + 1] < target) ++seg;
      const double w = (target - arc[seg]) / std::max(arc[seg + 1] - arc[seg], 1e-300);
      Vec p = (1.0 - w) * poly[seg] + w * poly[seg + 1];
      // snap the chord point back onto the curve
      Vec g = S.f_grad(p);
      p -= S.f(p) * g / g.squaredNorm();
      pts.push_back(p);
    }
    return pts;
  }
  // N >= 3: deterministic directions, projected along the ray from the center
  Rng rng(seed);
  for (int j = 0; j < n; ++j) pts.push_back(cast_to_boundary(S, rng.direction(S.dim)));
  return pts;
}

std::vector<Vec> sample_interior(const EmbeddedSphere& S, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> pts;
  pts.reserve(n);
  const double R = S.bounding_radius;
  int guard = 0;
  while (static_cast<int>(pts.size()) < n) {
    if (++guard > 100000 * n) throw ConstructionError("interior rejection sampling stalled");
    Vec y = S.center_hint + rng.uniform_vec(S.dim, -R, R);
    if (S.f(y) < 0) pts.push_back(y);
  }
  return pts;
}

}  // namespace pblab
