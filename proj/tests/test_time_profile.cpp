#include <doctest.h>

#include <cmath>

#include "pblab/time_profile.hpp"

using namespace pblab;

namespace {

BasketFunction unit_basket(int n) {
  return build_basket(builtin_sphere("unit-sphere", {{"n", double(n)}, {"radius", 1.0}}));
}

}  // namespace

TEST_CASE("time profile verifies to quadrature accuracy") {
  for (int n : {1, 2}) {
    CAPTURE(n);
    const auto profile = build_time_profile(unit_basket(n), 1.0, 0.25, 1.1, 2.2);
    const auto rep = verify_time_profile(profile, 64, 64, 1e-8);
    CHECK(rep.pass);
    // the bump is polynomial on each panel, so the average is exact
    CHECK(rep.average_defect < 1e-12);
    CHECK(rep.support_defect == 0.0);
    CHECK(rep.saturation_defect == 0.0);
  }
}

TEST_CASE("bump has unit average and vanishes outside its window") {
  const auto profile = build_time_profile(unit_basket(2), 2.0, 0.5, 1.1, 2.2);
  CHECK(profile.bump_t(0.0) == 0.0);
  CHECK(profile.bump_t(0.5) == 0.0);
  CHECK(profile.bump_t(1.7) == 0.0);
  CHECK(profile.bump_t(0.25) > 0.0);

  // Simpson average over a fine mesh of [0, period]
  const int m = 4000;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = 2.0 * i / m;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * profile.bump_t(t);
  }
  acc *= (2.0 / m) / 3.0 / 2.0;  // step/3, then divide by the period
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pointwise structure of the forcing profile") {
  const auto basket = unit_basket(2);
  const auto profile = build_time_profile(basket, 1.0, 0.25, 1.1, 2.2);

  Vec eta(2);

  // inside S: identically zero at all times
  eta << 0.3, -0.2;
  for (double t : {0.0, 0.1, 0.6}) CHECK(profile.eval(t, eta) == 0.0);

  // outside S but within the enclosing ball: pure bump modulation
  eta << 1.05, 0.0;
  REQUIRE(eta.norm() < 1.1);
  const double h = basket.eval(eta);
  REQUIRE(h > 0.0);
  CHECK(profile.eval(0.1, eta) == doctest::Approx(h * profile.bump_t(0.1)).epsilon(1e-14));
  CHECK(profile.eval(0.9, eta) == 0.0);  // past the bump window

  // beyond the saturation radius: time-independent, equal to the basket
  eta << 2.5, 0.8;
  REQUIRE(eta.norm() >= 2.2);
  for (double t : {0.0, 0.13, 0.77}) CHECK(profile.eval(t, eta) == basket.eval(eta));

  // in the blend collar the value interpolates between the two regimes
  eta << 1.6, 0.0;
  const double chi = profile.radial_blend(eta.norm());
  CHECK(chi > 0.0);
  CHECK(chi < 1.0);
  const double expected =
      basket.eval(eta) * ((1.0 - chi) * profile.bump_t(0.1) + chi);
  CHECK(profile.eval(0.1, eta) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("radial blend ramps monotonically from 0 to 1") {
  const auto profile = build_time_profile(unit_basket(2), 1.0, 0.25, 1.1, 2.2);
  CHECK(profile.radial_blend(1.1) == 0.0);
  CHECK(profile.radial_blend(1.0) == 0.0);
  CHECK(profile.radial_blend(2.2) == 1.0);
  CHECK(profile.radial_blend(5.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double rho = 1.1 + (2.2 - 1.1) * i / 50;
    const double c = profile.radial_blend(rho);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("profile construction rejects inconsistent geometry") {
  const auto basket = unit_basket(2);
  CHECK_THROWS_AS(build_time_profile(basket, 1.0, 0.0, 1.1, 2.2), ConstructionError);
  CHECK_THROWS_AS(build_time_profile(basket, 1.0, 1.5, 1.1, 2.2), ConstructionError);
  CHECK_THROWS_AS(build_time_profile(basket, 1.0, 0.25, 2.2, 1.1), ConstructionError);
  // enclosing radius smaller than the sphere itself
  CHECK_THROWS_AS(build_time_profile(basket, 1.0, 0.25, 0.5, 2.2), ConstructionError);
}
