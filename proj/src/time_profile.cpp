#include "pblab/time_profile.hpp"

#include <cmath>

namespace pblab {

namespace {

double smoothstep(double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

// 5-point Gauss-Legendre on [-1, 1]
constexpr double gl_x[5] = {-0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
                            0.538469310105683091036314420700, 0.906179845938663992797626878299};
constexpr double gl_w[5] = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                            0.568888888888888888888888888889, 0.478628670499366468041291514836,
                            0.236926885056189087514264040720};

}  // namespace

double TimeProfile::bump_t(double t) const {
  if (t <= 0.0 || t >= tau) return 0.0;
  const double s = t / tau;
  const double v = s * (1.0 - s);
  // integral of s^3 (1-s)^3 over [0,1] is 1/140
  return (140.0 * period / tau) * v * v * v;
}

double TimeProfile::radial_blend(double rho) const {
  return smoothstep((rho - big_r) / (r0 - big_r));
}

double TimeProfile::eval(double t, const Vec& eta) const {
  const double h = basket.eval(eta);
  if (h == 0.0) return 0.0;
  const double chi = radial_blend(eta.norm());
  const double w = (1.0 - chi) * bump_t(t) + chi;
  return h * w;
}

TimeProfile build_time_profile(const BasketFunction& basket, double period, double tau,
                               double big_r, double r0) {
  if (!(tau > 0.0 && tau <= period)) throw ConstructionError("bump support must lie inside the period");
  if (!(r0 > big_r)) throw ConstructionError("saturation radius must exceed the enclosing radius");
  // big_r must actually enclose S (it feeds the support condition)
  const double need = basket.S.bounding_radius + basket.S.center_hint.norm();
  if (big_r < need) throw ConstructionError("enclosing radius does not cover the sphere");
  TimeProfile p;
  p.basket = basket;
  p.period = period;
  p.tau = tau;
  p.big_r = big_r;
  p.r0 = r0;
  return p;
}

TimeProfileReport verify_time_profile(const TimeProfile& profile, int n_radii, int n_t, double tol,
                                      int n_directions, std::uint64_t seed) {
  TimeProfileReport rep;
  const EmbeddedSphere& S = profile.basket.S;
  const double T = profile.period;
  Rng rng(seed);

  std::vector<Vec> dirs;
  if (S.dim == 1) {
    Vec a(1), b(1);
    a << 1.0;
    b << -1.0;
    dirs = {a, b};
  } else if (S.dim == 2) {
    for (int i = 0; i < n_directions; ++i) {
      const double phi = two_pi * i / n_directions;
      Vec u(2);
      u << std::cos(phi), std::sin(phi);
      dirs.push_back(u);
    }
  } else {
    for (int i = 0; i < n_directions; ++i) dirs.push_back(rng.direction(S.dim));
  }

  const double rho_max = 2.0 * profile.r0;
  for (int ir = 0; ir < n_radii; ++ir) {
    const double rho = rho_max * (ir + 0.5) / n_radii;
    for (const auto& u : dirs) {
      const Vec eta = rho * u;
      const double h = profile.basket.eval(eta);

      // composite 5-point Gauss-Legendre average over [0, T], with the panel
      // mesh split at tau so each panel sees a single polynomial piece
      double acc = 0.0;
      const int half = std::max(n_t / 2, 1);
      const double bounds[3] = {0.0, profile.tau, T};
      for (int piece = 0; piece < 2; ++piece) {
        const double dt = (bounds[piece + 1] - bounds[piece]) / half;
        if (dt <= 0) continue;
        for (int s = 0; s < half; ++s) {
          const double mid = bounds[piece] + (s + 0.5) * dt;
          double panel = 0.0;
          for (int g = 0; g < 5; ++g)
            panel += gl_w[g] * profile.eval(mid + 0.5 * dt * gl_x[g], eta);
          acc += panel * 0.5 * dt;  // GL weights sum to 2
        }
      }
      rep.average_defect = std::max(rep.average_defect, std::abs(acc / T - h));

      // support: outside Delta the profile must vanish identically
      const bool outside_ball = rho > profile.big_r;
      for (int s = 0; s <= n_t; ++s) {
        const double t = T * s / n_t;
        const bool in_bump_window = t <= profile.tau;
        const bool in_support = (in_bump_window && !S.inside(eta)) || outside_ball;
        if (!in_support)
          rep.support_defect = std::max(rep.support_defect, std::abs(profile.eval(t, eta)));
        if (rho >= profile.r0)
          rep.saturation_defect = std::max(rep.saturation_defect, std::abs(profile.eval(t, eta) - h));
      }
    }
  }

  rep.pass = rep.support_defect < tol && rep.average_defect < tol && rep.saturation_defect < tol;
  return rep;
}

}  // namespace pblab
