#include "pblab/splitting.hpp"

#include <limits>

namespace pblab {

Mat assemble_symplectic_form(const TruncatedLoopSpace& space) {
  const int n = space.n_dof(), K = space.cutoff();
  Mat B = Mat::Zero(space.dim_e(), space.dim_e());
  // Per mode and coordinate, in the order (xc, xs, yc, ys), the form is
  //   B(e, e) = 2 (xc*ys - xs*yc)
  // independent of k: the 1/w_k basis weight cancels the k from the time
  // derivative.  The y-means never appear (constant loops are the kernel).
  for (int k = 1; k <= K; ++k) {
    for (int i = 0; i < n; ++i) {
      const int xc = space.idx_xc(k, i), xs = space.idx_xs(k, i);
      const int yc = space.idx_yc(k, i), ys = space.idx_ys(k, i);
      B(xc, ys) = 1.0;
      B(ys, xc) = 1.0;
      B(xs, yc) = -1.0;
      B(yc, xs) = -1.0;
    }
  }
  return B;
}

SpectralSplitting build_splitting(const TruncatedLoopSpace& space) {
  const Mat B = assemble_symplectic_form(space);
  const int d = space.dim_e();
  const int n = space.n_dof();

  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success) throw ConstructionError("symplectic form eigensolve failed");

  SpectralSplitting sp;
  sp.eigenvalues = es.eigenvalues();

  const double zero_tol = 1e-8;
  sp.proj_plus = Mat::Zero(d, d);
  sp.proj_minus = Mat::Zero(d, d);
  sp.proj_zero = Mat::Zero(d, d);
  sp.eps0 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    const double lam = sp.eigenvalues[j];
    const Vec u = es.eigenvectors().col(j);
    if (std::abs(lam) <= zero_tol) {
      sp.proj_zero += u * u.transpose();
      ++sp.dim_zero;
    } else if (lam > 0) {
      sp.proj_plus += u * u.transpose();
      ++sp.dim_plus;
      sp.eps0 = std::min(sp.eps0, lam);
    } else {
      sp.proj_minus += u * u.transpose();
      ++sp.dim_minus;
      sp.eps0 = std::min(sp.eps0, -lam);
    }
  }
  if (sp.dim_zero != n)
    throw ConstructionError("kernel of the symplectic form has unexpected dimension");

  sp.L = sp.proj_plus - sp.proj_minus;
  sp.renorm_defect = (B - sp.L).lpNorm<Eigen::Infinity>();
  if (sp.renorm_defect > 1e-10)
    throw ConstructionError("renormalised operator drifted from the assembled form");
  return sp;
}

}  // namespace pblab
