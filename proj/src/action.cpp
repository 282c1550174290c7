#include "pblab/action.hpp"

#include <cmath>
#include <vector>

namespace pblab {

ActionFunctional::ActionFunctional(const HamiltonianSystem& sys, const TruncatedLoopSpace& space,
                                   const SpectralSplitting& splitting)
    : sys_(sys), space_(space), split_(splitting) {
  if (sys.n_dof != space.n_dof())
    throw ConstructionError("system and loop space dimension mismatch");
}

double ActionFunctional::value(const LoopPoint& p) const {
  const Mat Z = space_.synthesize(p.e, p.v);
  const double T = sys_.period;
  double psi = 0.0;
  for (int m = 0; m < space_.n_nodes(); ++m)
    psi += sys_.eval(space_.node_time(m) * T, Z.row(m).transpose());
  psi *= T / space_.n_nodes();
  return 0.5 * p.e.dot(split_.L * p.e) + psi;
}

void ActionFunctional::node_gradients(const LoopPoint& p, Mat& G) const {
  const Mat Z = space_.synthesize(p.e, p.v);
  const double T = sys_.period;
  const int M = space_.n_nodes();
  G.resize(M, 2 * space_.n_dof());
  Vec g;
  for (int m = 0; m < M; ++m) {
    sys_.grad(space_.node_time(m) * T, Z.row(m).transpose(), g);
    G.row(m) = T * g.transpose();
  }
}

Vec ActionFunctional::psi_gradient(const LoopPoint& p) const {
  Mat G;
  node_gradients(p, G);
  return space_.project_gradient(G);
}

Vec ActionFunctional::gradient(const LoopPoint& p) const {
  Vec grad = psi_gradient(p);
  grad.head(space_.dim_e()) += split_.L * p.e;
  return grad;
}

Mat ActionFunctional::hessian(const LoopPoint& p) const {
  const int M = space_.n_nodes();
  const int n = space_.n_dof();
  const int dim = space_.dim_total();
  const int nb = 2 * space_.cutoff() + 1;
  const Mat& basis = space_.scalar_basis();
  const double T = sys_.period;

  Mat H = Mat::Zero(dim, dim);
  H.topLeftCorner(space_.dim_e(), space_.dim_e()) = split_.L;

  // nodewise Hessians of H1, component-pair weights
  const Mat Z = space_.synthesize(p.e, p.v);
  std::vector<Mat> W(M);
  if (sys_.has_hessian()) {
    for (int m = 0; m < M; ++m) {
      sys_.hess(space_.node_time(m) * T, Z.row(m).transpose(), W[m]);
      W[m] *= T;
    }
  } else {
    // central differences of grad at each node
    Vec gp, gm;
    for (int m = 0; m < M; ++m) {
      const double t = space_.node_time(m) * T;
      const Vec z = Z.row(m).transpose();
      Mat w(2 * n, 2 * n);
      for (int j = 0; j < 2 * n; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(z[j]));
        Vec zp = z, zm = z;
        zp[j] += step;
        zm[j] -= step;
        sys_.grad(t, zp, gp);
        sys_.grad(t, zm, gm);
        w.col(j) = (gp - gm) / (2.0 * step);
      }
      W[m] = T * 0.5 * (w + w.transpose());
    }
  }

  // psi Hessian: for each coordinate pair (c, d) the block is
  // basis^T diag(W_m[c,d]) basis / M, scattered to the global indices.
  Vec wcd(M);
  Mat block(nb, nb);
  for (int c = 0; c < 2 * n; ++c) {
    for (int d = c; d < 2 * n; ++d) {
      for (int m = 0; m < M; ++m) wcd[m] = W[m](c, d);
      block.noalias() = basis.transpose() * wcd.asDiagonal() * basis;
      block /= M;
      for (int a = 0; a < nb; ++a) {
        const int ga = space_.scalar_basis_index(c, a);
        for (int b = 0; b < nb; ++b) {
          const int gb = space_.scalar_basis_index(d, b);
          H(ga, gb) += block(a, b);
          if (d != c) H(gb, ga) += block(a, b);
        }
      }
    }
  }
  return H;
}

}  // namespace pblab
