#pragma once

#include <complex>
#include <vector>

#include "pblab/hamiltonian.hpp"
#include "pblab/integrator.hpp"

namespace pblab {

// Solve the Hamiltonian ODE from z0 over [t0, t1].
Trajectory flow_trajectory(const HamiltonianSystem& sys, const Vec& z0, double t0, double t1,
                           double tol = 1e-10);

// Time-T map data:  P(x,y) = (x + theta, rho).  theta is the unreduced
// angular displacement x(T) - x(0); rho = y(T).
struct PoincareResult {
  Vec theta;
  Vec rho;
  Vec z_final;
  Trajectory traj;
};

PoincareResult poincare_map(const HamiltonianSystem& sys, const Vec& z0, double tol = 1e-10);

struct MonodromyResult {
  Mat matrix;                                  // fundamental solution at t = T
  Vec z_final;                                 // orbit endpoint z(T)
  std::vector<std::complex<double>> multipliers;
  double symplectic_defect = 0.0;              // ||M^T J M - J||_inf
  double reciprocity_defect = 0.0;             // pairing defect max_i min_j |mu_i mu_j - 1|
  double margin = 0.0;                         // min_i |mu_i - 1|
  bool nondegenerate = false;                  // margin > threshold
  double periodicity_residual = 0.0;           // lattice-reduced ||z(T) - z(0) - (2 pi k, 0)||
  bool periodicity_warning = false;
};

// Linearise along the solution through z0: integrates Z' = J Hess H(t,z(t)) Z
// jointly with the orbit and eigen-decomposes Z(T).  Uses the analytic
// Hessian when available, otherwise central differences of grad.
MonodromyResult monodromy(const HamiltonianSystem& sys, const Vec& z0, double tol = 1e-11,
                          double nondeg_threshold = 1e-6, double periodicity_threshold = 1e-6);

struct ShootingResult {
  bool converged = false;
  Vec z0;                    // refined initial condition
  Eigen::VectorXi k;         // winding vector: x(T) - x(0) = 2 pi k at the fixed point
  double residual = 0.0;     // ||z(T) - z0 - (2 pi k, 0)||
  int iterations = 0;
  bool singular_jacobian = false;
  double jacobian_condition = 0.0;
};

// Newton shooting for z(T) = z(0) + (2 pi k, 0).  The winding vector k is
// locked to the nearest lattice vector after the first integration so the
// iteration cannot drift between branches.
ShootingResult refine_periodic(const HamiltonianSystem& sys, const Vec& z0_guess,
                               double newton_tol = 1e-10, int max_iter = 40, double tol = 1e-11);

}  // namespace pblab
