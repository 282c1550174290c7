#include "pblab/flow.hpp"

#include <cmath>
#include <limits>

namespace pblab {

namespace {

OdeRhs hamiltonian_rhs(const HamiltonianSystem& sys) {
  return [&sys](double t, const Vec& z, Vec& out) { symplectic_field(sys, t, z, out); };
}

// Hess H at (t,z), analytic or by central differences of grad.
void hessian_of(const HamiltonianSystem& sys, double t, const Vec& z, Mat& w) {
  if (sys.has_hessian()) {
    sys.hess(t, z, w);
    return;
  }
  const int d = static_cast<int>(z.size());
  w.resize(d, d);
  Vec zp, zm, gp, gm;
  for (int j = 0; j < d; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(z[j]));
    zp = z;
    zm = z;
    zp[j] += step;
    zm[j] -= step;
    sys.grad(t, zp, gp);
    sys.grad(t, zm, gm);
    w.col(j) = (gp - gm) / (2.0 * step);
  }
  w = 0.5 * (w + w.transpose());  // symmetrise FD noise
}

Mat symplectic_J(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

}  // namespace

Trajectory flow_trajectory(const HamiltonianSystem& sys, const Vec& z0, double t0, double t1,
                           double tol) {
  IntegratorOptions opt;
  opt.tol = tol;
  return integrate_ode(hamiltonian_rhs(sys), z0, t0, t1, opt);
}

PoincareResult poincare_map(const HamiltonianSystem& sys, const Vec& z0, double tol) {
  const int n = sys.n_dof;
  PoincareResult res;
  res.traj = flow_trajectory(sys, z0, 0.0, sys.period, tol);
  res.z_final = res.traj.final_state();
  res.theta = res.z_final.head(n) - z0.head(n);
  res.rho = res.z_final.tail(n);
  return res;
}

MonodromyResult monodromy(const HamiltonianSystem& sys, const Vec& z0, double tol,
                          double nondeg_threshold, double periodicity_threshold) {
  const int n = sys.n_dof;
  const int d = 2 * n;

  // augmented state: orbit z followed by the 2N x 2N fundamental matrix
  Vec u0(d + d * d);
  u0.head(d) = z0;
  Mat id = Mat::Identity(d, d);
  u0.tail(d * d) = Eigen::Map<const Vec>(id.data(), d * d);

  Mat w;
  auto rhs = [&](double t, const Vec& u, Vec& du) {
    du.resize(d + d * d);
    Vec z = u.head(d);
    Vec fz;
    symplectic_field(sys, t, z, fz);
    du.head(d) = fz;
    hessian_of(sys, t, z, w);
    Eigen::Map<const Mat> Z(u.tail(d * d).data(), d, d);
    Mat JW(d, d);
    JW.topRows(n) = w.bottomRows(n);   // J * W: top block = W's y-rows
    JW.bottomRows(n) = -w.topRows(n);
    Mat dZ = JW * Z;
    du.tail(d * d) = Eigen::Map<const Vec>(dZ.data(), d * d);
  };

  IntegratorOptions opt;
  opt.tol = tol;
  Trajectory traj = integrate_ode(rhs, u0, 0.0, sys.period, opt);
  const Vec uf = traj.final_state();

  MonodromyResult res;
  res.matrix = Eigen::Map<const Mat>(uf.tail(d * d).data(), d, d);
  res.z_final = uf.head(d);

  // periodicity of the base orbit, up to 2 pi shifts in x
  Vec dz = uf.head(d) - z0;
  Eigen::VectorXi k = nearest_lattice(dz.head(n));
  for (int i = 0; i < n; ++i) dz[i] -= two_pi * k[i];
  res.periodicity_residual = dz.norm();
  res.periodicity_warning = res.periodicity_residual > periodicity_threshold;

  Eigen::EigenSolver<Mat> es(res.matrix);
  res.multipliers.resize(d);
  for (int i = 0; i < d; ++i) res.multipliers[i] = es.eigenvalues()[i];

  const Mat J = symplectic_J(n);
  res.symplectic_defect = (res.matrix.transpose() * J * res.matrix - J).lpNorm<Eigen::Infinity>();

  res.reciprocity_defect = 0.0;
  res.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) best = std::min(best, std::abs(res.multipliers[i] * res.multipliers[j] - 1.0));
    res.reciprocity_defect = std::max(res.reciprocity_defect, best);
    res.margin = std::min(res.margin, std::abs(res.multipliers[i] - 1.0));
  }
  res.nondegenerate = res.margin > nondeg_threshold;
  return res;
}

ShootingResult refine_periodic(const HamiltonianSystem& sys, const Vec& z0_guess,
                               double newton_tol, int max_iter, double tol) {
  const int n = sys.n_dof;
  const int d = 2 * n;

  ShootingResult res;
  res.z0 = z0_guess;
  res.k = Eigen::VectorXi::Zero(n);

  bool have_k = false;
  Vec F(d);
  double fnorm = 0.0;

  for (int it = 0; it < max_iter; ++it) {
    MonodromyResult mr = monodromy(sys, res.z0, tol, 1e-6, std::numeric_limits<double>::infinity());
    const Mat& M = mr.matrix;
    const Vec& zT = mr.z_final;

    if (!have_k) {
      res.k = nearest_lattice(zT.head(n) - res.z0.head(n));
      have_k = true;
    }
    F = zT - res.z0;
    for (int i = 0; i < n; ++i) F[i] -= two_pi * res.k[i];
    fnorm = F.norm();
    res.residual = fnorm;
    res.iterations = it;

    Mat DF = M - Mat::Identity(d, d);
    Eigen::JacobiSVD<Mat> svd(DF, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // directions with sigma < 1e-8 smax would amplify integration noise in F
    // into O(1) spurious steps (e.g. the phase direction along an orbit of an
    // autonomous system); truncate them and correct only what is determined
    svd.setThreshold(1e-8);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(d - 1);
    res.jacobian_condition = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
    // reflects the current iterate; a singular DF still yields a least-squares
    // step along the non-degenerate directions
    res.singular_jacobian = smin < 1e-10 * std::max(1.0, smax);
    if (fnorm < newton_tol) {
      res.converged = true;
      break;
    }
    Vec delta = -svd.solve(F);
    if (!delta.allFinite()) break;
    const double cap = 1.0;  // trust region: field is 2 pi periodic in x
    if (delta.norm() > cap) delta *= cap / delta.norm();

    // backtracking on ||F||
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 10; ++ls) {
      Vec z_try = res.z0 + alpha * delta;
      Vec zT_try;
      try {
        zT_try = poincare_map(sys, z_try, tol).z_final;
      } catch (const IntegrationError&) {
        alpha *= 0.5;
        continue;
      }
      Vec F_try = zT_try - z_try;
      for (int i = 0; i < n; ++i) F_try[i] -= two_pi * res.k[i];
      if (F_try.norm() < fnorm * (1.0 - 1e-4 * alpha) || F_try.norm() < newton_tol) {
        res.z0 = z_try;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stagnated
  }

  if (!res.converged) {
    // final residual for the record
    try {
      Vec zT = poincare_map(sys, res.z0, tol).z_final;
      F = zT - res.z0;
      for (int i = 0; i < n; ++i) F[i] -= two_pi * res.k[i];
      res.residual = F.norm();
      res.converged = res.residual < newton_tol;
    } catch (const IntegrationError&) {
    }
  }
  return res;
}

}  // namespace pblab
