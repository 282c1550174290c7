#include "pblab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pblab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = 1.0 + std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

Vec Trajectory::eval(double t) const {
  const double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
  if (t < lo - 1e-9 || t > hi + 1e-9) throw EvaluationError("trajectory evaluated outside its span");
  t = std::clamp(t, lo, hi);
  // segments are ordered by t0; find the one containing t
  int a = 0, b = static_cast<int>(steps.size()) - 1;
  const bool fwd = t_end >= t_begin;
  while (a < b) {
    const int mid = (a + b) / 2;
    const double seg_end = steps[mid].t0 + steps[mid].h;
    if (fwd ? (t <= seg_end) : (t >= seg_end))
      b = mid;
    else
      a = mid + 1;
  }
  return steps[a].eval((t - steps[a].t0) / steps[a].h);
}

Vec Trajectory::deriv(double t) const {
  const double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
  t = std::clamp(t, lo, hi);
  int a = 0, b = static_cast<int>(steps.size()) - 1;
  const bool fwd = t_end >= t_begin;
  while (a < b) {
    const int mid = (a + b) / 2;
    const double seg_end = steps[mid].t0 + steps[mid].h;
    if (fwd ? (t <= seg_end) : (t >= seg_end))
      b = mid;
    else
      a = mid + 1;
  }
  return steps[a].deriv((t - steps[a].t0) / steps[a].h);
}

Trajectory integrate_ode(const OdeRhs& rhs, const Vec& z0, double t0, double t1,
                         const IntegratorOptions& opt) {
  const int dim = static_cast<int>(z0.size());
  const double span = std::abs(t1 - t0);
  const double dir = t1 >= t0 ? 1.0 : -1.0;

  Trajectory traj;
  traj.t_begin = t0;
  traj.t_end = t1;
  traj.times.push_back(t0);
  traj.states.push_back(z0);

  if (span == 0.0) {
    traj.est_error = std::numeric_limits<double>::epsilon();
    DenseStep s;
    s.t0 = t0;
    s.h = 1.0;
    s.r1 = z0;
    s.r2 = s.r3 = s.r4 = s.r5 = Vec::Zero(dim);
    traj.steps.push_back(s);
    return traj;
  }

  Vec y = z0, k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), ytmp(dim), y1(dim),
      err(dim);
  double t = t0;
  rhs(t, y, k1);
  if (!k1.allFinite()) throw IntegrationError("vector field not finite at start", t);

  // initial step: match the magnitude of the field and its variation
  double h;
  {
    const double d0 = error_norm(y, y, y), df = error_norm(k1, y, y);
    double h0 = (df > 1e-10) ? 0.01 * std::max(d0, 1.0) / df : 1e-6 * span;
    h0 = std::min(h0, span);
    ytmp = y + dir * h0 * k1;
    rhs(t + dir * h0, ytmp, k2);
    const double d2 = error_norm(k2 - k1, y, y) / h0;
    double h1 = (std::max(df, d2) > 1e-15) ? std::pow(0.01 / std::max(df, d2), 0.2) : h0 * 100;
    h = std::min({100 * h0, h1, span});
  }
  if (opt.max_step > 0) h = std::min(h, opt.max_step);

  const double tol = opt.tol;
  double resid_max = 0.0, y_scale = 1.0 + y.lpNorm<Eigen::Infinity>();
  long n_steps = 0;

  while (dir * (t1 - t) > 0) {
    if (++n_steps > opt.max_steps) throw IntegrationError("step budget exhausted", t);
    h = std::min(h, std::abs(t1 - t));
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw IntegrationError("step size underflow", t);
    const double hs = dir * h;

    ytmp = y + hs * (a21 * k1);
    rhs(t + c2 * hs, ytmp, k2);
    ytmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, ytmp, k3);
    ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, ytmp, k4);
    ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, ytmp, k5);
    ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, ytmp, k6);
    y1 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hs, y1, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    bool ok = y1.allFinite() && k7.allFinite();
    // error per unit step: local error <= tol * h / span
    const double target = tol * (h / span);
    const double en = ok ? error_norm(err, y, y1) : std::numeric_limits<double>::infinity();
    if (!ok || en > target) {
      const double f = ok ? std::max(0.2, 0.9 * std::pow(target / en, 0.25)) : 0.2;
      h *= f;
      continue;
    }

    DenseStep s;
    s.t0 = t;
    s.h = hs;
    s.r1 = y;
    s.r2 = y1 - y;
    s.r3 = hs * k1 - s.r2;
    s.r4 = s.r2 - hs * k7 - s.r3;
    s.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    // measured interpolant defect at the step midpoint
    ytmp = s.eval(0.5);
    rhs(t + 0.5 * hs, ytmp, k2);
    resid_max = std::max(resid_max, (s.deriv(0.5) - k2).lpNorm<Eigen::Infinity>());

    t += hs;
    y.swap(y1);
    k1.swap(k7);
    y_scale = std::max(y_scale, 1.0 + y.lpNorm<Eigen::Infinity>());
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.steps.push_back(std::move(s));

    double f = (en > 1e-300) ? 0.9 * std::pow(target / en, 0.25) : 5.0;
    h *= std::clamp(f, 0.2, 5.0);
    if (opt.max_step > 0) h = std::min(h, opt.max_step);
  }

  traj.est_error = std::max(resid_max, std::numeric_limits<double>::epsilon() * y_scale);
  return traj;
}

}  // namespace pblab
