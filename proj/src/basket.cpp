#include "pblab/basket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pblab {

namespace {

// quintic smoothstep and the cubic lift used to match the tail derivative
double Sq(double r) { return r * r * r * (10.0 + r * (-15.0 + 6.0 * r)); }
double Sq1(double r) {
  const double v = r * (1.0 - r);
  return 30.0 * v * v;
}
double Tq(double r) { return r * r * r * (r - 1.0); }
double Tq1(double r) { return r * r * (4.0 * r - 3.0); }
double bump(double r) {
  const double v = r * (1.0 - r);
  return v * v * v;
}
double bump1(double r) {
  const double v = r * (1.0 - r);
  return 3.0 * v * v * (1.0 - 2.0 * r);
}

double spectral_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  double w = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) w = std::max(w, std::abs(es.eigenvalues()[i]));
  return w;
}

std::vector<Vec> level_directions(const EmbeddedSphere& S, int n, std::uint64_t seed) {
  std::vector<Vec> dirs;
  if (S.dim == 1) {
    Vec a(1), b(1);
    a << 1.0;
    b << -1.0;
    dirs = {a, b};
  } else if (S.dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double phi = two_pi * i / n;
      Vec u(2);
      u << std::cos(phi), std::sin(phi);
      dirs.push_back(u);
    }
  } else {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) dirs.push_back(rng.direction(S.dim));
  }
  return dirs;
}

}  // namespace

BasketFunction build_basket(const EmbeddedSphere& S, const BasketBuildOptions& opt) {
  if (!S.has_hessian())
    throw CapabilityError("basket construction needs the sphere's defining Hessian");

  const auto dirs = level_directions(S, opt.n_directions, opt.seed);

  // how far the defining function reaches at the far verification radius
  double r_max = 0.0;
  for (const auto& u : dirs)
    r_max = std::max(r_max, S.f(S.center_hint + (opt.far_radius_factor * S.bounding_radius) * u));
  if (!(r_max > 1.0)) throw ConstructionError("defining function does not grow away from S");

  // log-spaced construction grid for the derivative budget m(r)
  std::vector<double> levels;
  const double r_lo = 1e-2;
  for (int j = 0; j < opt.n_levels; ++j) {
    const double t = static_cast<double>(j) / (opt.n_levels - 1);
    levels.push_back(r_lo * std::pow(r_max / r_lo, t));
  }

  BasketFunction basket;
  basket.S = S;
  basket.grid.reserve(levels.size());
  for (double r : levels) {
    double worst = 0.0;
    for (const auto& u : dirs) {
      const Vec y = cast_to_level(S, u, r);
      worst = std::max(worst, S.f_grad(y).norm() + spectral_norm(S.f_hess(y)));
    }
    BasketGridRow row;
    row.r = r;
    row.m_sampled = (r + 1.0) * worst;
    basket.grid.push_back(row);
  }

  // power-law majorant m_hat(r) = A (1+r)^p: least-squares slope in log-log,
  // then lift A so the envelope clears every sample with headroom
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int nrows = static_cast<int>(basket.grid.size());
  for (const auto& row : basket.grid) {
    const double lx = std::log1p(row.r), ly = std::log(std::max(row.m_sampled, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double p = (nrows * sxy - sx * sy) / std::max(nrows * sxx - sx * sx, 1e-12);
  p = std::max(p, 0.0);
  double A = 0.0;
  for (const auto& row : basket.grid) A = std::max(A, row.m_sampled / std::pow(1.0 + row.r, p));
  A *= opt.safety;
  if (!(A > 0.0)) throw ConstructionError("degenerate derivative budget");

  // tail exponent and amplitude guaranteeing, for every r >= 1,
  //   g'(r) = kappa (1+r)^-q < 1/m_hat(r)  and  |g''(r)| < 1/m_hat(r)^2
  const double q = std::max({p + 1.0, 2.0 * p - 1.0, 2.0});
  const double kappa = 0.9 * std::min({std::pow(2.0, q - p) / (2.0 * A),
                                       std::pow(2.0, q + 1.0 - 2.0 * p) / (q * A * A),
                                       0.5 * (q - 1.0) * std::pow(2.0, q - 1.0)});

  const double phi1 = kappa * std::pow(2.0, -q);          // g'(1)
  const double gamma = -q * kappa * std::pow(2.0, -q - 1.0);  // g''(1)
  const double tail_mass = kappa * std::pow(2.0, 1.0 - q) / (q - 1.0);  // 1 - g(1)
  const double beta = 140.0 * (1.0 - tail_mass - 0.5 * phi1 + gamma / 20.0);
  if (!(beta > 0.0)) throw ConstructionError("profile mass balance failed");

  RadialProfile prof;
  prof.kappa = kappa;
  prof.q = q;
  prof.env_a = A;
  prof.env_p = p;
  prof.d1 = [phi1, gamma, beta, kappa, q](double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return kappa * std::pow(1.0 + r, -q);
    return phi1 * Sq(r) + gamma * Tq(r) + beta * bump(r);
  };
  prof.d2 = [phi1, gamma, beta, kappa, q](double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return -q * kappa * std::pow(1.0 + r, -q - 1.0);
    return phi1 * Sq1(r) + gamma * Tq1(r) + beta * bump1(r);
  };
  prof.value = [phi1, gamma, beta, kappa, q](double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return 1.0 - kappa * std::pow(1.0 + r, 1.0 - q) / (q - 1.0);
    const double r4 = r * r * r * r;
    const double i_sq = r4 * (2.5 + r * (-3.0 + r));                       // int of Sq
    const double i_tq = r4 * (r / 5.0 - 0.25);                             // int of Tq
    const double i_bump = r4 * (0.25 + r * (-0.6 + r * (0.5 - r / 7.0)));  // int of bump
    return phi1 * i_sq + gamma * i_tq + beta * i_bump;
  };
  basket.profile = prof;

  // junction sanity: value continuous at r = 1 by the mass-balance choice
  if (std::abs(prof.value(1.0 - 1e-13) - prof.value(1.0)) > 1e-10)
    throw ConstructionError("profile junction mismatch at r = 1");

  for (auto& row : basket.grid) {
    row.m_env = A * std::pow(1.0 + row.r, p);
    row.g = prof.value(row.r);
    row.g1 = prof.d1(row.r);
    row.g2 = prof.d2(row.r);
    if (row.m_env < row.m_sampled) throw ConstructionError("envelope fails to cover a sample");
    if (row.r >= 1.0) {
      const bool ok = row.g1 > 0.0 && row.g1 < 1.0 / row.m_env && row.g2 < 0.0 &&
                      row.g2 > -1.0 / (row.m_env * row.m_env);
      if (!ok) throw ConstructionError("derivative budget violated on the construction grid");
    }
  }
  return basket;
}

BasketReport verify_basket(const BasketFunction& basket, const BasketVerifyOptions& opt) {
  const EmbeddedSphere& S = basket.S;
  BasketReport rep;

  // (a) identically zero on the closed interior
  {
    auto& ax = rep.vanish_inside;
    ax.pass = true;
    for (const Vec& y : sample_interior(S, opt.n_interior, opt.seed)) {
      const double defect = std::max(std::abs(basket.eval(y)), basket.grad(y).norm());
      if (defect > ax.worst) {
        ax.worst = defect;
        if (defect >= opt.tol) {
          ax.pass = false;
          ax.witness = y;
          ax.note = "h or grad h does not vanish inside";
        }
      }
    }
  }

  // (b) nonvanishing gradient outside: profile scan over the construction
  // grid and its midpoints, each level witnessed by an actual point of S_r
  {
    auto& ax = rep.grad_nonzero;
    ax.pass = true;
    std::vector<double> levels;
    for (size_t i = 0; i < basket.grid.size(); ++i) {
      levels.push_back(basket.grid[i].r);
      if (i + 1 < basket.grid.size())
        levels.push_back(0.5 * (basket.grid[i].r + basket.grid[i + 1].r));
    }
    Vec probe(S.dim);
    probe.setZero();
    probe[0] = 1.0;
    ax.worst = std::numeric_limits<double>::infinity();
    for (double r : levels) {
      const double g1 = basket.profile.d1(r);
      const Vec y = cast_to_level(S, probe, r);
      const double gn = basket.grad(y).norm();
      const double margin = std::min(g1, gn);
      if (margin < ax.worst) ax.worst = margin;
      if (!(margin > 0.0)) {
        ax.pass = false;
        ax.witness = y;
        ax.note = "gradient vanishes on an exterior level set";
        break;
      }
    }
  }

  // (c) gradient direction matches the outward normal in a collar around S
  {
    auto& ax = rep.collar_normal;
    ax.pass = true;
    const double delta = opt.collar_delta * S.bounding_radius;
    for (const Vec& y0 : sample_boundary(S, opt.n_boundary, opt.seed ^ 0xc011a)) {
      const Vec nu = S.normal(y0);
      const Vec y = y0 + delta * nu;
      const Vec g = basket.grad(y);
      if (g.norm() == 0.0) {
        ax.pass = false;
        ax.witness = y;
        ax.note = "gradient vanished in the collar";
        break;
      }
      const double angle = std::acos(std::clamp(g.normalized().dot(nu), -1.0, 1.0));
      if (angle > ax.worst) {
        ax.worst = angle;
        if (angle >= opt.tol) {
          ax.pass = false;
          ax.witness = y;
          ax.note = "gradient direction deviates from the normal";
        }
      }
    }
  }

  // (d) saturation far out: h -> 1 with flattening derivatives
  {
    auto& ax = rep.saturates;
    ax.pass = true;
    const double far = opt.far_factor * S.bounding_radius;
    for (const Vec& u : level_directions(S, opt.n_far_directions, opt.seed ^ 0xfa5)) {
      const Vec y = S.center_hint + far * u;
      const double defect = std::max({std::abs(basket.eval(y) - 1.0), basket.grad(y).norm(),
                                      spectral_norm(basket.hess(y))});
      if (defect > ax.worst) {
        ax.worst = defect;
        if (defect >= opt.tail_tol) {
          ax.pass = false;
          ax.witness = y;
          ax.note = "h fails to saturate at the far radius";
        }
      }
    }
  }

  // derivative budget on the stored grid (r >= 1)
  {
    rep.derivative_budget = true;
    rep.budget_worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& row : basket.grid) {
      if (row.r < 1.0) continue;
      const double slack = std::min({row.g1, 1.0 / row.m_env - row.g1, -row.g2,
                                     1.0 / (row.m_env * row.m_env) + row.g2});
      rep.budget_worst_slack = std::min(rep.budget_worst_slack, slack);
      if (!(slack > 0.0)) rep.derivative_budget = false;
    }
  }

  rep.verdict = rep.vanish_inside.pass && rep.grad_nonzero.pass && rep.collar_normal.pass &&
                rep.saturates.pass && rep.derivative_budget;
  return rep;
}

}  // namespace pblab
