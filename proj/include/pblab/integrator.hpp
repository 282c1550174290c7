#pragma once

#include <functional>
#include <vector>

#include "pblab/types.hpp"

namespace pblab {

using OdeRhs = std::function<void(double, const Vec&, Vec&)>;

// One accepted step with the quartic interpolation polynomial in
// theta = (t - t0)/h (Hermite-type continuous extension of the pair).
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec r1, r2, r3, r4, r5;

  Vec eval(double theta) const {
    const double s1 = 1.0 - theta;
    return r1 + theta * (r2 + s1 * (r3 + theta * (r4 + s1 * r5)));
  }
  // d/dt of the interpolant.
  Vec deriv(double theta) const {
    Vec d = r2 + (1.0 - 2.0 * theta) * r3 + theta * (2.0 - 3.0 * theta) * r4 +
            2.0 * theta * (1.0 - theta) * (1.0 - 2.0 * theta) * r5;
    return d / h;
  }
};

// Continuous solution on [t_begin, t_end].  `times`/`states` hold the
// accepted step mesh; eval/deriv use the per-step interpolants.
// est_error is the maximum measured defect ||z' - f(t,z)|| of the
// interpolant at step midpoints, i.e. the accuracy the returned object
// actually delivers (floored at round-off scale).
struct Trajectory {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<DenseStep> steps;
  double est_error = 0.0;

  Vec eval(double t) const;
  Vec deriv(double t) const;
  const Vec& final_state() const { return states.back(); }
};

struct IntegratorOptions {
  double tol = 1e-10;        // error per unit step, absolute+relative mixed
  double max_step = 0.0;     // 0 = no cap
  long max_steps = 5'000'000;
};

// Explicit Runge-Kutta 5(4) with FSAL and dense output; error control is
// per unit step so endpoint accuracy stays ~tol independent of step count.
Trajectory integrate_ode(const OdeRhs& rhs, const Vec& z0, double t0, double t1,
                         const IntegratorOptions& opt = {});

}  // namespace pblab
