#include <doctest.h>

#include <cmath>

#include "pblab/rays.hpp"

using namespace pblab;

namespace {

HamiltonianSystem pendulum(int n, double eps) {
  return builtin_system("decoupled-pendulum", {{"n", double(n)}, {"epsilon", eps}});
}

EmbeddedSphere ball(int n, double radius = 1.0) {
  return builtin_sphere("unit-sphere", {{"n", double(n)}, {"radius", radius}});
}

RaysOptions quick_opts() {
  RaysOptions opt;
  opt.n_boundary = 32;
  opt.n_angles = 6;
  opt.n_interior = 16;
  return opt;
}

}  // namespace

TEST_CASE("uncoupled rotation avoids the inward rays with margin one") {
  // eps = 0: theta = y0 * T exactly, parallel to the outward normal, so the
  // distance to the inward ray is |theta| = 1 and the margin is exactly 1
  const auto sys = pendulum(2, 0.0);
  const auto S = ball(2);
  const auto rep = check_avoiding_rays(sys, S, RaySide::Inward, quick_opts());
  CHECK(rep.verifiable);
  CHECK(rep.verdict);
  CHECK(rep.min_margin == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.max_margin == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(!rep.worst.empty());
  CHECK(rep.worst.front().margin == doctest::Approx(rep.min_margin));
}

TEST_CASE("uncoupled rotation hits the outward rays exactly") {
  const auto sys = pendulum(2, 0.0);
  const auto S = ball(2);
  const auto rep = check_avoiding_rays(sys, S, RaySide::Outward, quick_opts());
  CHECK(rep.verifiable);
  CHECK(!rep.verdict);
  CHECK(rep.max_margin < 1e-9);
}

TEST_CASE("weak pendulum passes inward and keeps a wide margin") {
  const auto sys = pendulum(2, 0.1);
  const auto S = ball(2);
  const auto rep = check_avoiding_rays(sys, S, RaySide::Inward, quick_opts());
  CHECK(rep.verifiable);
  CHECK(rep.verdict);
  CHECK(rep.min_margin > 0.5);
  CHECK(rep.n_boundary == 32);
  CHECK(rep.n_angles == 6);
  CHECK(rep.n_interior == 16);
  CHECK(static_cast<int>(rep.worst.size()) <= quick_opts().keep_worst);

  // worst list is sorted ascending and reproduces the extremes
  for (size_t i = 1; i < rep.worst.size(); ++i)
    CHECK(rep.worst[i - 1].margin <= rep.worst[i].margin);
}

TEST_CASE("momentum reversal swaps the forbidden side") {
  const auto sys = pendulum(2, 0.1);
  const auto rev = reversed_momentum(sys);
  const auto S = ball(2);

  const auto fwd = check_avoiding_rays(sys, S, RaySide::Inward, quick_opts());
  const auto bwd = check_avoiding_rays(rev, S, RaySide::Outward, quick_opts());
  CHECK(fwd.verdict);
  CHECK(bwd.verdict);
  // the flows are conjugate under y -> -y, so the margins agree closely even
  // though the boundary samples are not literally paired
  CHECK(std::abs(fwd.min_margin - bwd.min_margin) < 0.05);

  // and the original system fails the outward test it would need otherwise
  const auto wrong = check_avoiding_rays(sys, S, RaySide::Outward, quick_opts());
  CHECK(!wrong.verdict);
}

TEST_CASE("containment threshold separates pass from fail") {
  const auto sys = pendulum(2, 0.1);
  const auto S = ball(2);
  auto opt = quick_opts();

  opt.margin_tol = 1e-2;
  const auto lo = check_avoiding_rays(sys, S, RaySide::Inward, opt);
  CHECK(lo.verdict);

  // min_margin <= 1 by normalisation, so a threshold at 1 must flag a hit
  opt.margin_tol = 1.0;
  const auto hi = check_avoiding_rays(sys, S, RaySide::Inward, opt);
  CHECK(!hi.verdict);
  CHECK(hi.min_margin == doctest::Approx(lo.min_margin).epsilon(1e-12));
}

TEST_CASE("a finite-time blowup makes the result not verifiable") {
  // H = x y^2: y' = -y^2, so y(t) = y0/(1 + y0 t) blows up at t = -1/y0 for
  // y0 < 0; the boundary point y0 = -1 dies at t = 1 < T = 2
  HamiltonianSystem sys;
  sys.n_dof = 1;
  sys.period = 2.0;
  sys.smoothness = Smoothness::C2;
  sys.name = "blowup";
  sys.eval = [](double, const Vec& z) { return z[0] * z[1] * z[1]; };
  sys.grad = [](double, const Vec& z, Vec& g) {
    g.resize(2);
    g[0] = z[1] * z[1];
    g[1] = 2.0 * z[0] * z[1];
  };

  const auto S = ball(1);
  auto opt = quick_opts();
  const auto rep = check_avoiding_rays(sys, S, RaySide::Inward, opt);
  CHECK(!rep.verifiable);
  CHECK(!rep.verdict);
  CHECK(!rep.failure_note.empty());
}
