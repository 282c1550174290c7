#pragma once

#include "pblab/types.hpp"

namespace pblab {

// Truncated Fourier model of the loop space H^{1/2}(R/Z, R^N) x H^{1/2}:
// oscillating x-modes, oscillating y-modes, the y-mean, and the x-mean kept
// separately as a point v on the torus (R/2piZ)^N.
//
// Coefficient layout in e (dimension 4NK + N):
//   for k = 1..K, i = 0..N-1: [x-cos, x-sin, y-cos, y-sin]  (4 slots each)
//   then ybar_0..ybar_{N-1}.
//
// Basis functions carry the H^{1/2}-type weight 1/sqrt(w_k), w_k = 2 pi k:
//   x_i(t) = v_i + sum_k sqrt(2)/sqrt(w_k) (xc cos(2 pi k t) + xs sin(2 pi k t))
// With this normalisation the loop inner product is plain Euclidean on e and
// the symplectic form block-diagonalises with eigenvalues exactly +-1.
class TruncatedLoopSpace {
 public:
  TruncatedLoopSpace(int n_dof, int cutoff);

  int n_dof() const { return n_; }
  int cutoff() const { return k_; }
  int n_nodes() const { return m_; }
  int dim_e() const { return 4 * n_ * k_ + n_; }
  int dim_total() const { return dim_e() + n_; }  // e plus the torus point v

  int idx_xc(int k, int i) const { return 4 * (n_ * (k - 1) + i); }
  int idx_xs(int k, int i) const { return idx_xc(k, i) + 1; }
  int idx_yc(int k, int i) const { return idx_xc(k, i) + 2; }
  int idx_ys(int k, int i) const { return idx_xc(k, i) + 3; }
  int idx_ybar(int i) const { return 4 * n_ * k_ + i; }

  double weight(int k) const { return std::max(1.0, two_pi * k); }

  double node_time(int m) const { return static_cast<double>(m) / m_; }

  // Values at the quadrature nodes: Z is (n_nodes x 2N), columns x then y.
  Mat synthesize(const Vec& e, const Vec& v) const;

  // Loop value at an arbitrary time.
  Vec value_at(const Vec& e, const Vec& v, double t) const;

  // Recover (e, v) from node values; exact (to round-off) for loops of
  // Fourier degree <= cutoff since n_nodes > 2*cutoff.
  void analyze(const Mat& Z, Vec& e, Vec& v) const;

  // Adjoint of `synthesize` with the quadrature weight 1/M folded in: given
  // nodewise gradients G (n_nodes x 2N), returns d/d(e,v) of
  // (1/M) sum_m <G_m, z_m>.
  Vec project_gradient(const Mat& G) const;

  // Per-coordinate scalar basis matrix (n_nodes x (2K+1)):
  // columns are the scaled cos_k, scaled sin_k, then the constant 1.
  const Mat& scalar_basis() const { return basis_; }

  // Global column index (in the (e,v) vector) of scalar-basis column b
  // applied to coordinate comp (0..2N-1, x first).
  int scalar_basis_index(int comp, int b) const;

 private:
  int n_, k_, m_;
  Mat basis_;  // n_nodes x (2K+1)
};

struct LoopPoint {
  Vec e;
  Vec v;
};

}  // namespace pblab
