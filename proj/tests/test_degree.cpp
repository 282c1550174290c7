#include <doctest.h>

#include <cmath>
#include <complex>

#include "pblab/degree.hpp"

using namespace pblab;

namespace {

EmbeddedSphere ball(int n, double r = 1.0) {
  return builtin_sphere("unit-sphere", {{"n", double(n)}, {"radius", r}});
}

}  // namespace

TEST_CASE("identity has degree one in every dimension") {
  for (int n : {1, 2, 3, 4}) {
    const VectorMap id = [](const Vec& y) { return y; };
    CAPTURE(n);
    CHECK(brouwer_degree(id, ball(n)) == 1);
  }
}

TEST_CASE("the antipodal map has degree (-1)^N") {
  for (int n : {1, 2, 3, 4}) {
    const VectorMap neg = [](const Vec& y) { return Vec(-y); };
    CAPTURE(n);
    CHECK(brouwer_degree(neg, ball(n)) == (n % 2 == 0 ? 1 : -1));
  }
}

TEST_CASE("one reflected coordinate flips the sign") {
  for (int n : {2, 3, 4}) {
    const VectorMap refl = [](const Vec& y) {
      Vec r = y;
      r[0] = -r[0];
      return r;
    };
    CAPTURE(n);
    CHECK(brouwer_degree(refl, ball(n)) == -1);
  }
}

TEST_CASE("planar rotations are degree one") {
  const double c = std::cos(0.7), s = std::sin(0.7);
  const VectorMap rot = [c, s](const Vec& y) {
    Vec r(2);
    r << c * y[0] - s * y[1], s * y[0] + c * y[1];
    return r;
  };
  CHECK(brouwer_degree(rot, ball(2)) == 1);
}

TEST_CASE("complex powers give their winding as degree") {
  // z -> z^k on the unit circle winds k times
  for (int k : {2, 3}) {
    const VectorMap pow_k = [k](const Vec& y) {
      const std::complex<double> z(y[0], y[1]);
      const auto w = std::pow(z, k);
      Vec r(2);
      r << w.real(), w.imag();
      return r;
    };
    CAPTURE(k);
    CHECK(brouwer_degree(pow_k, ball(2)) == k);
  }
  // and the conjugate power winds backwards
  const VectorMap conj2 = [](const Vec& y) {
    const std::complex<double> z(y[0], -y[1]);
    const auto w = z * z;
    Vec r(2);
    r << w.real(), w.imag();
    return r;
  };
  CHECK(brouwer_degree(conj2, ball(2)) == -2);
}

TEST_CASE("translations detect whether the zero stays inside") {
  for (int n : {1, 2, 3}) {
    Vec c = Vec::Zero(n);
    c[0] = 0.4;
    const VectorMap near = [c](const Vec& y) { return Vec(y - c); };
    CAPTURE(n);
    CHECK(brouwer_degree(near, ball(n)) == 1);
    Vec far = Vec::Zero(n);
    far[0] = 1.7;
    const VectorMap miss = [far](const Vec& y) { return Vec(y - far); };
    CHECK(brouwer_degree(miss, ball(n)) == 0);
  }
}

TEST_CASE("a zero on the boundary is reported as unreliable") {
  Vec c(2);
  c << 1.0, 0.0;  // the map vanishes exactly at a boundary point
  const VectorMap bad = [c](const Vec& y) { return Vec(y - c); };
  CHECK_THROWS_AS(brouwer_degree(bad, ball(2)), UnreliableResultError);
}

TEST_CASE("degree is stable under nonlinear interior deformation") {
  // y -> y * (0.5 + |y|^2) keeps the boundary image nonvanishing and the
  // single zero at the origin with positive Jacobian
  for (int n : {2, 3}) {
    const VectorMap warp = [](const Vec& y) { return Vec(y * (0.5 + y.squaredNorm())); };
    CAPTURE(n);
    CHECK(brouwer_degree(warp, ball(n)) == 1);
  }
}
