#include "pblab/loop_space.hpp"

#include <cmath>

namespace pblab {

TruncatedLoopSpace::TruncatedLoopSpace(int n_dof, int cutoff) : n_(n_dof), k_(cutoff) {
  if (n_ < 1 || k_ < 1) throw ConstructionError("loop space needs n >= 1 and cutoff >= 1");
  m_ = 8 * k_ + 1;  // odd, and > 4K: trapezoid on the nodes integrates
                    // products of basis functions exactly
  basis_ = Mat(m_, 2 * k_ + 1);
  for (int m = 0; m < m_; ++m) {
    const double t = node_time(m);
    for (int k = 1; k <= k_; ++k) {
      const double scale = std::sqrt(2.0 / weight(k));
      basis_(m, k - 1) = scale * std::cos(two_pi * k * t);
      basis_(m, k_ + k - 1) = scale * std::sin(two_pi * k * t);
    }
    basis_(m, 2 * k_) = 1.0;
  }
}

int TruncatedLoopSpace::scalar_basis_index(int comp, int b) const {
  const bool is_y = comp >= n_;
  const int i = is_y ? comp - n_ : comp;
  if (b < k_) return is_y ? idx_yc(b + 1, i) : idx_xc(b + 1, i);
  if (b < 2 * k_) return is_y ? idx_ys(b - k_ + 1, i) : idx_xs(b - k_ + 1, i);
  return is_y ? idx_ybar(i) : dim_e() + i;  // constant term: ybar or v
}

Mat TruncatedLoopSpace::synthesize(const Vec& e, const Vec& v) const {
  Mat Z = Mat::Zero(m_, 2 * n_);
  for (int i = 0; i < n_; ++i) {
    Z.col(i).setConstant(v[i]);
    Z.col(n_ + i).setConstant(e[idx_ybar(i)]);
  }
  for (int k = 1; k <= k_; ++k) {
    const auto c = basis_.col(k - 1);
    const auto s = basis_.col(k_ + k - 1);
    for (int i = 0; i < n_; ++i) {
      Z.col(i) += e[idx_xc(k, i)] * c + e[idx_xs(k, i)] * s;
      Z.col(n_ + i) += e[idx_yc(k, i)] * c + e[idx_ys(k, i)] * s;
    }
  }
  return Z;
}

Vec TruncatedLoopSpace::value_at(const Vec& e, const Vec& v, double t) const {
  Vec z(2 * n_);
  for (int i = 0; i < n_; ++i) {
    z[i] = v[i];
    z[n_ + i] = e[idx_ybar(i)];
  }
  for (int k = 1; k <= k_; ++k) {
    const double scale = std::sqrt(2.0 / weight(k));
    const double c = scale * std::cos(two_pi * k * t);
    const double s = scale * std::sin(two_pi * k * t);
    for (int i = 0; i < n_; ++i) {
      z[i] += e[idx_xc(k, i)] * c + e[idx_xs(k, i)] * s;
      z[n_ + i] += e[idx_yc(k, i)] * c + e[idx_ys(k, i)] * s;
    }
  }
  return z;
}

void TruncatedLoopSpace::analyze(const Mat& Z, Vec& e, Vec& v) const {
  e = Vec::Zero(dim_e());
  v = Vec::Zero(n_);
  const double inv_m = 1.0 / m_;
  for (int i = 0; i < n_; ++i) {
    v[i] = Z.col(i).mean();
    e[idx_ybar(i)] = Z.col(n_ + i).mean();
  }
  for (int k = 1; k <= k_; ++k) {
    const auto c = basis_.col(k - 1);
    const auto s = basis_.col(k_ + k - 1);
    // basis columns have squared node-mean 1/w_k; invert that scale
    const double wk = weight(k);
    for (int i = 0; i < n_; ++i) {
      e[idx_xc(k, i)] = wk * inv_m * c.dot(Z.col(i));
      e[idx_xs(k, i)] = wk * inv_m * s.dot(Z.col(i));
      e[idx_yc(k, i)] = wk * inv_m * c.dot(Z.col(n_ + i));
      e[idx_ys(k, i)] = wk * inv_m * s.dot(Z.col(n_ + i));
    }
  }
}

Vec TruncatedLoopSpace::project_gradient(const Mat& G) const {
  Vec out = Vec::Zero(dim_total());
  const double inv_m = 1.0 / m_;
  for (int i = 0; i < n_; ++i) {
    out[dim_e() + i] = G.col(i).sum() * inv_m;
    out[idx_ybar(i)] = G.col(n_ + i).sum() * inv_m;
  }
  for (int k = 1; k <= k_; ++k) {
    const auto c = basis_.col(k - 1);
    const auto s = basis_.col(k_ + k - 1);
    for (int i = 0; i < n_; ++i) {
      out[idx_xc(k, i)] = c.dot(G.col(i)) * inv_m;
      out[idx_xs(k, i)] = s.dot(G.col(i)) * inv_m;
      out[idx_yc(k, i)] = c.dot(G.col(n_ + i)) * inv_m;
      out[idx_ys(k, i)] = s.dot(G.col(n_ + i)) * inv_m;
    }
  }
  return out;
}

}  // namespace pblab
