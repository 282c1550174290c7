#include "pblab/reduction.hpp"

#include <cmath>
#include <vector>

namespace pblab {

ReducedPoint reduce_tail(const ActionFunctional& af, const LoopPoint& low, int reduced_cutoff,
                         double tol, int max_iter) {
  const TruncatedLoopSpace& space = af.space();
  const int K = space.cutoff();
  if (reduced_cutoff >= K) throw ConstructionError("reduced cutoff must be below the full cutoff");

  std::vector<int> tail;
  for (int k = reduced_cutoff + 1; k <= K; ++k)
    for (int i = 0; i < space.n_dof(); ++i) {
      tail.push_back(space.idx_xc(k, i));
      tail.push_back(space.idx_xs(k, i));
      tail.push_back(space.idx_yc(k, i));
      tail.push_back(space.idx_ys(k, i));
    }

  ReducedPoint out;
  out.full = low;
  for (int idx : tail) out.full.e[idx] = 0.0;

  const Mat& L = af.splitting().L;
  double prev_update = -1.0;
  int expansions = 0;

  for (int it = 0; it < max_iter; ++it) {
    const Vec grad_psi = af.psi_gradient(out.full);
    // g_new = -L (Id - pi) grad_psi on the tail slots; L is block diagonal
    // over modes, so applying it to the full gradient and reading the tail
    // entries equals restricting first.
    Vec Lg = L * grad_psi.head(space.dim_e());
    double update = 0.0;
    for (int idx : tail) {
      const double g_new = -Lg[idx];
      update += (g_new - out.full.e[idx]) * (g_new - out.full.e[idx]);
      out.full.e[idx] = g_new;
    }
    update = std::sqrt(update);
    out.iterations = it + 1;

    if (prev_update >= 0.0 && prev_update > 1e-300) {
      const double ratio = update / prev_update;
      out.contraction_factor = std::max(out.contraction_factor, ratio);
      if (ratio >= 1.0 && ++expansions >= 3)
        throw ReductionError("tail iteration is not contracting", ratio);
    }
    prev_update = update;
    if (update < tol) {
      out.converged = true;
      break;
    }
  }

  Vec grad = af.gradient(out.full);
  double acc = 0.0;
  for (int idx : tail) acc += grad[idx] * grad[idx];
  out.tail_residual = std::sqrt(acc);
  return out;
}

}  // namespace pblab
