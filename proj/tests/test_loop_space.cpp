#include <doctest.h>

#include <cmath>

#include "pblab/loop_space.hpp"
#include "pblab/rng.hpp"

using namespace pblab;

TEST_CASE("dimension bookkeeping") {
  for (auto [n, k] : {std::pair{1, 4}, {2, 8}, {3, 2}}) {
    const TruncatedLoopSpace space(n, k);
    CHECK(space.n_dof() == n);
    CHECK(space.cutoff() == k);
    CHECK(space.n_nodes() == 8 * k + 1);
    CHECK(space.dim_e() == 4 * n * k + n);
    CHECK(space.dim_total() == 4 * n * k + 2 * n);
  }
  CHECK_THROWS_AS(TruncatedLoopSpace(0, 4), ConstructionError);
  CHECK_THROWS_AS(TruncatedLoopSpace(2, 0), ConstructionError);
}

TEST_CASE("coefficient layout is contiguous and complete") {
  const TruncatedLoopSpace space(3, 5);
  std::vector<int> seen(space.dim_e(), 0);
  for (int k = 1; k <= 5; ++k)
    for (int i = 0; i < 3; ++i) {
      ++seen[space.idx_xc(k, i)];
      ++seen[space.idx_xs(k, i)];
      ++seen[space.idx_yc(k, i)];
      ++seen[space.idx_ys(k, i)];
    }
  for (int i = 0; i < 3; ++i) ++seen[space.idx_ybar(i)];
  for (int idx : seen) CHECK(idx == 1);
}

TEST_CASE("synthesize and analyze invert each other") {
  const TruncatedLoopSpace space(2, 6);
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec e = rng.gaussian_vec(space.dim_e());
    const Vec v = rng.uniform_vec(2, 0.0, two_pi);
    const Mat Z = space.synthesize(e, v);
    REQUIRE(Z.rows() == space.n_nodes());
    REQUIRE(Z.cols() == 4);
    Vec e2, v2;
    space.analyze(Z, e2, v2);
    CHECK((e2 - e).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((v2 - v).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("node rows agree with the pointwise evaluation") {
  const TruncatedLoopSpace space(2, 3);
  Rng rng(7);
  const Vec e = rng.gaussian_vec(space.dim_e());
  const Vec v = rng.uniform_vec(2, 0.0, two_pi);
  const Mat Z = space.synthesize(e, v);
  for (int m = 0; m < space.n_nodes(); m += 3) {
    const Vec z = space.value_at(e, v, space.node_time(m));
    CHECK((Z.row(m).transpose() - z).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}

TEST_CASE("a single mode reproduces the weighted harmonic") {
  const int n = 2, k = 3;
  const TruncatedLoopSpace space(n, 5);
  Vec e = Vec::Zero(space.dim_e());
  Vec v = Vec::Zero(n);
  v << 1.0, -0.5;
  e[space.idx_xc(k, 0)] = 2.0;
  e[space.idx_ys(k, 1)] = -1.5;

  const double scale = std::sqrt(2.0 / (two_pi * k));
  for (double t : {0.0, 0.17, 0.5, 0.93}) {
    const Vec z = space.value_at(e, v, t);
    CHECK(z[0] == doctest::Approx(1.0 + 2.0 * scale * std::cos(two_pi * k * t)).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(z[2] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(z[3] == doctest::Approx(-1.5 * scale * std::sin(two_pi * k * t)).epsilon(1e-14));
  }
}

TEST_CASE("loop mean recovers v and ybar exactly") {
  // the oscillating basis columns sum to zero over the nodes, so the column
  // means of Z are exactly the constant parts
  const TruncatedLoopSpace space(1, 4);
  Rng rng(3);
  const Vec e = rng.gaussian_vec(space.dim_e());
  Vec v(1);
  v << 2.3;
  const Mat Z = space.synthesize(e, v);
  CHECK(Z.col(0).mean() == doctest::Approx(2.3).epsilon(1e-13));
  CHECK(Z.col(1).mean() == doctest::Approx(e[space.idx_ybar(0)]).epsilon(1e-13));
}

TEST_CASE("project_gradient is the adjoint of synthesize") {
  // <project_gradient(G), (e, v)> must equal (1/M) sum_m <G_m, z_m> for all
  // G and (e, v), because synthesize is linear
  const TruncatedLoopSpace space(2, 4);
  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec e = rng.gaussian_vec(space.dim_e());
    const Vec v = rng.gaussian_vec(2);
    Mat G(space.n_nodes(), 4);
    for (int m = 0; m < G.rows(); ++m)
      for (int c = 0; c < 4; ++c) G(m, c) = rng.gaussian();

    const Vec pg = space.project_gradient(G);
    REQUIRE(pg.size() == space.dim_total());
    double lhs = pg.head(space.dim_e()).dot(e) + pg.tail(2).dot(v);

    const Mat Z = space.synthesize(e, v);
    double rhs = 0.0;
    for (int m = 0; m < Z.rows(); ++m) rhs += G.row(m).dot(Z.row(m));
    rhs /= space.n_nodes();

    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("scalar basis columns wire into the global layout") {
  const TruncatedLoopSpace space(2, 3);
  const Mat& B = space.scalar_basis();
  REQUIRE(B.rows() == space.n_nodes());
  REQUIRE(B.cols() == 2 * 3 + 1);

  // constant column
  for (int m = 0; m < B.rows(); ++m) CHECK(B(m, 6) == 1.0);

  // column b < K is the scaled cos_{b+1}; K <= b < 2K the scaled sin
  const int m_probe = 5;
  const double t = space.node_time(m_probe);
  for (int k = 1; k <= 3; ++k) {
    const double scale = std::sqrt(2.0 / (two_pi * k));
    CHECK(B(m_probe, k - 1) == doctest::Approx(scale * std::cos(two_pi * k * t)).epsilon(1e-14));
    CHECK(B(m_probe, 3 + k - 1) == doctest::Approx(scale * std::sin(two_pi * k * t)).epsilon(1e-14));
  }

  // index map: putting 1 in the mapped slot must light up exactly that column
  for (int comp : {0, 1, 2, 3}) {
    for (int b : {0, 2, 3, 5, 6}) {
      const int g = space.scalar_basis_index(comp, b);
      Vec e = Vec::Zero(space.dim_e());
      Vec v = Vec::Zero(2);
      if (g < space.dim_e())
        e[g] = 1.0;
      else
        v[g - space.dim_e()] = 1.0;
      const Mat Z = space.synthesize(e, v);
      for (int m = 0; m < Z.rows(); m += 7)
        CHECK(Z(m, comp) == doctest::Approx(B(m, b)).epsilon(1e-14));
    }
  }
}
