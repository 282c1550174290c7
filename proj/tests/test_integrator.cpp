#include <doctest.h>

#include <cmath>

#include "pblab/flow.hpp"
#include "pblab/integrator.hpp"
#include "pblab/rng.hpp"

using namespace pblab;

namespace {

HamiltonianSystem pendulum(int n, double eps, double period = 1.0) {
  return builtin_system("decoupled-pendulum",
                        {{"n", double(n)}, {"epsilon", eps}, {"period", period}});
}

OdeRhs rhs_of(const HamiltonianSystem& sys) {
  return [&sys](double t, const Vec& z, Vec& out) { symplectic_field(sys, t, z, out); };
}

}  // namespace

TEST_CASE("free rotation is integrated exactly") {
  // eps = 0: x(t) = x0 + t y0, y constant; the RK stages are exact on it
  const auto sys = pendulum(2, 0.0);
  const auto rhs = rhs_of(sys);
  Vec z0(4);
  z0 << 0.3, 5.2, -1.1, 0.7;
  const auto traj = integrate_ode(rhs, z0, 0.0, 1.0);
  const Vec zT = traj.final_state();
  CHECK(std::abs(zT[0] - (0.3 - 1.1)) < 1e-13);
  CHECK(std::abs(zT[1] - (5.2 + 0.7)) < 1e-13);
  CHECK(std::abs(zT[2] + 1.1) < 1e-14);
  CHECK(std::abs(zT[3] - 0.7) < 1e-14);
  // and the dense output reproduces the line in between
  for (double t : {0.11, 0.37, 0.62, 0.99}) {
    const Vec z = traj.eval(t);
    CHECK(std::abs(z[0] - (0.3 - 1.1 * t)) < 1e-13);
    CHECK(std::abs(z[3] - 0.7) < 1e-14);
  }
}

TEST_CASE("endpoint energy drift stays below 10x the tolerance") {
  // H is autonomous here, so conservation measures global endpoint accuracy
  const auto sys = pendulum(1, 0.1, 10.0);
  const auto rhs = rhs_of(sys);
  Vec z0(2);
  z0 << 1.3, 0.8;
  const double h0 = sys.eval(0.0, z0);
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegratorOptions opt;
    opt.tol = tol;
    const auto traj = integrate_ode(rhs, z0, 0.0, 10.0, opt);
    const double drift = std::abs(sys.eval(0.0, traj.final_state()) - h0);
    CAPTURE(tol);
    CHECK(drift < 10.0 * tol);
  }
}

TEST_CASE("dense output hits the accepted states at the mesh times") {
  const auto sys = pendulum(2, 0.1);
  const auto rhs = rhs_of(sys);
  Rng rng(21);
  const Vec z0 = rng.gaussian_vec(4);
  const auto traj = integrate_ode(rhs, z0, 0.0, 1.0);
  REQUIRE(traj.times.size() == traj.states.size());
  REQUIRE(traj.times.size() >= 2);
  for (size_t i = 0; i < traj.times.size(); ++i)
    CHECK((traj.eval(traj.times[i]) - traj.states[i]).norm() < 1e-12);
}

TEST_CASE("est_error honestly bounds the interpolant defect at step midpoints") {
  const auto sys = pendulum(2, 0.1);
  const auto rhs = rhs_of(sys);
  Rng rng(4);
  for (double tol : {1e-7, 1e-10}) {
    IntegratorOptions opt;
    opt.tol = tol;
    const Vec z0 = rng.gaussian_vec(4);
    const auto traj = integrate_ode(rhs, z0, 0.0, 1.0, opt);
    CHECK(traj.est_error > 0.0);
    double worst = 0.0;
    Vec f;
    for (const auto& step : traj.steps) {
      const double tm = step.t0 + 0.5 * step.h;
      rhs(tm, traj.eval(tm), f);
      worst = std::max(worst, (traj.deriv(tm) - f).norm());
    }
    CAPTURE(tol);
    CHECK(worst < 10.0 * traj.est_error);
  }
}

TEST_CASE("finite-time blowup raises IntegrationError with the failure time") {
  // y' = y^2 from y(0) = 1 blows up at t = 1
  const OdeRhs rhs = [](double, const Vec& z, Vec& out) {
    out.resize(1);
    out[0] = z[0] * z[0];
  };
  Vec z0(1);
  z0 << 1.0;
  try {
    integrate_ode(rhs, z0, 0.0, 2.0);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.last_time <= 1.0 + 1e-6);
    CHECK(e.last_time > 0.5);
  }
}

TEST_CASE("step budget violations raise IntegrationError") {
  const auto sys = pendulum(1, 0.1);
  const auto rhs = rhs_of(sys);
  Vec z0(2);
  z0 << 0.4, 0.2;
  IntegratorOptions opt;
  opt.max_steps = 3;
  CHECK_THROWS_AS(integrate_ode(rhs, z0, 0.0, 1000.0, opt), IntegrationError);
}

TEST_CASE("endpoint error tracks the requested tolerance against a tight reference") {
  const auto sys = pendulum(1, 0.3, 1.0);
  const auto rhs = rhs_of(sys);
  Vec z0(2);
  z0 << 2.0, 0.5;
  IntegratorOptions tight;
  tight.tol = 1e-13;
  const Vec ref = integrate_ode(rhs, z0, 0.0, 1.0, tight).final_state();
  for (double tol : {1e-5, 1e-7, 1e-9}) {
    IntegratorOptions opt;
    opt.tol = tol;
    const Vec got = integrate_ode(rhs, z0, 0.0, 1.0, opt).final_state();
    CAPTURE(tol);
    CHECK((got - ref).norm() < 10.0 * tol);
  }
}

TEST_CASE("derivative of the interpolant matches the field along a solved orbit") {
  const auto sys = pendulum(2, 0.1);
  const auto traj = flow_trajectory(sys, Vec::Constant(4, 0.5), 0.0, 1.0, 1e-11);
  Vec f;
  for (double t : {0.2, 0.5, 0.8}) {
    symplectic_field(sys, t, traj.eval(t), f);
    CHECK((traj.deriv(t) - f).norm() < 1e-7);
  }
}
