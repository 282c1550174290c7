#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "pblab/critical_search.hpp"

using namespace pblab;

namespace {

struct Fixture {
  HamiltonianSystem sys;
  TruncatedLoopSpace space;
  SpectralSplitting split;
  ActionFunctional af;

  Fixture(const HamiltonianSystem& s, int cutoff)
      : sys(s), space(s.n_dof, cutoff), split(build_splitting(space)), af(sys, space, split) {}
};

HamiltonianSystem pendulum(int n, double eps) {
  return builtin_system("decoupled-pendulum", {{"n", double(n)}, {"epsilon", eps}});
}

// wrapped distance on the torus
double torus_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), two_pi);
  return std::min(d, two_pi - d);
}

bool set_contains_v(const std::vector<CriticalPoint>& pts, const Vec& v, double tol) {
  for (const auto& cp : pts) {
    double worst = 0.0;
    for (int i = 0; i < v.size(); ++i) worst = std::max(worst, torus_gap(cp.p.v[i], v[i]));
    if (worst < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("both pendulum equilibria appear as critical points") {
  Fixture fx(pendulum(1, 0.1), 4);
  SearchOptions opt;
  opt.budget = 40;
  const auto pts = find_critical_points(fx.af, opt);
  REQUIRE(pts.size() >= 2);

  Vec v0 = Vec::Zero(1), v1 = Vec::Constant(1, 0.5 * two_pi);
  CHECK(set_contains_v(pts, v0, 1e-6));
  CHECK(set_contains_v(pts, v1, 1e-6));
  for (const auto& cp : pts) {
    CHECK(cp.residual < 1e-8);
    CHECK(cp.p.v[0] >= 0.0);
    CHECK(cp.p.v[0] < two_pi);
  }

  // the two equilibria carry the known action values 0 and 2 eps
  double lo = 1e300, hi = -1e300;
  for (const auto& cp : pts) {
    lo = std::min(lo, cp.value);
    hi = std::max(hi, cp.value);
  }
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(hi == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("all four half-period lattice points emerge for two degrees of freedom") {
  Fixture fx(pendulum(2, 0.1), 3);
  SearchOptions opt;
  opt.budget = 60;
  const auto pts = find_critical_points(fx.af, opt);
  REQUIRE(pts.size() >= 4);

  const double pi_v = 0.5 * two_pi;
  for (double a : {0.0, pi_v})
    for (double b : {0.0, pi_v}) {
      Vec v(2);
      v << a, b;
      CAPTURE(a);
      CAPTURE(b);
      CHECK(set_contains_v(pts, v, 1e-6));
    }
}

TEST_CASE("results are deduplicated") {
  Fixture fx(pendulum(1, 0.1), 3);
  SearchOptions opt;
  opt.budget = 60;
  const auto pts = find_critical_points(fx.af, opt);
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) {
      double d = 0.0;
      for (int i = 0; i < 1; ++i) d = std::max(d, torus_gap(pts[a].p.v[i], pts[b].p.v[i]));
      d = std::max(d, (pts[a].p.e - pts[b].p.e).lpNorm<Eigen::Infinity>());
      CHECK(d > opt.dedup_tol);
    }
}

TEST_CASE("hints are refined and returned first") {
  Fixture fx(pendulum(1, 0.1), 3);
  SearchOptions opt;
  opt.budget = 8;  // tiny budget: the hint must still be processed
  LoopPoint hint{Vec::Zero(fx.space.dim_e()), Vec::Constant(1, 0.5 * two_pi + 1e-3)};
  const auto pts = find_critical_points(fx.af, opt, {hint});
  REQUIRE(!pts.empty());
  CHECK(set_contains_v(pts, Vec::Constant(1, 0.5 * two_pi), 1e-6));
}

TEST_CASE("the search is deterministic and worker-count independent") {
  Fixture fx(pendulum(2, 0.1), 2);
  SearchOptions opt;
  opt.budget = 30;

  const auto run = [&]() { return find_critical_points(fx.af, opt); };

  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());

  char* old = std::getenv("PBLAB_WORKERS");
  const std::string saved = old ? old : "";
  setenv("PBLAB_WORKERS", "1", 1);
  const auto c = run();
  setenv("PBLAB_WORKERS", "3", 1);
  const auto d = run();
  if (old)
    setenv("PBLAB_WORKERS", saved.c_str(), 1);
  else
    unsetenv("PBLAB_WORKERS");

  REQUIRE(c.size() == a.size());
  REQUIRE(d.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].value == c[i].value);
    CHECK(a[i].value == d[i].value);
    CHECK((a[i].p.v - c[i].p.v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a[i].p.v - d[i].p.v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a[i].p.e - d[i].p.e).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("a different seed still finds the same equilibria") {
  Fixture fx(pendulum(1, 0.1), 3);
  SearchOptions opt;
  opt.budget = 40;
  opt.seed = 777;
  const auto pts = find_critical_points(fx.af, opt);
  CHECK(set_contains_v(pts, Vec::Zero(1), 1e-6));
  CHECK(set_contains_v(pts, Vec::Constant(1, 0.5 * two_pi), 1e-6));
}
