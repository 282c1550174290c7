#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pblab/flow.hpp"
#include "pblab/sphere.hpp"

namespace pblab {

constexpr int kComparisonTimes = 16;  // interior times used by the orbit metric

// A refined T-periodic solution (possibly rotating: x(T) = x(0) + 2 pi k).
struct OrbitRecord {
  Vec z0;                    // initial condition, x components in [0, 2 pi)
  Eigen::VectorXi winding;
  double residual = 0.0;
  double action = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::complex<double>> multipliers;
  double stability_margin = 0.0;  // min |mu - 1|
  bool nondegenerate = false;
  bool interior = false;          // y(0) in int S
  bool degenerate_flag = false;   // unit multiplier / singular shooting Jacobian
  Mat comparison;                 // kComparisonTimes x 2N interior-time samples
  std::string source;             // "variational", "oracle", ...
};

// Integrate the orbit once and cache everything the census needs.
OrbitRecord make_orbit_record(const HamiltonianSystem& sys, const Vec& z0_raw,
                              const std::string& source, double integrator_tol = 1e-11,
                              double nondeg_threshold = 1e-6);

struct OrbitClass {
  int representative = -1;         // index into the record list
  std::vector<int> members;
  bool ambiguous = false;          // some pair landed in the grey zone [tol, 2 tol)
};

// Union-find clustering under the orbit metric: records are equivalent when
// some lattice shift 2 pi m aligns both the initial conditions and the
// trajectories at the comparison times within metric_tol.  Representatives
// minimise the wrapped x(0) lexicographically.
std::vector<OrbitClass> cluster_distinct(const std::vector<OrbitRecord>& records,
                                         double metric_tol = 1e-4);

struct OracleOptions {
  int grid_per_dim = 6;
  int budget = 20000;       // max coarse-scan integrations
  int refine_top = 48;      // how many promising cells get a Newton polish
  double newton_tol = 1e-10;
  double integrator_tol = 1e-10;
  double nondeg_threshold = 1e-6;
  double metric_tol = 1e-4;
  std::uint64_t seed = 42;
};

// Independent fixed-point scan of the time-T map over [0, 2 pi)^N x int S:
// coarse displacement grid, then shooting from the most promising cells.
// Returns one record per distinct orbit found.
std::vector<OrbitRecord> oracle_fixed_points(const HamiltonianSystem& sys, const EmbeddedSphere& S,
                                             const OracleOptions& opt = {});

struct CensusVerdict {
  int n_classes = 0;
  int n_interior = 0;
  int cuplength_bound = 0;   // N + 1
  int betti_bound = 0;       // 2^N
  bool meets_cuplength = false;
  bool meets_betti = false;      // only claimed when all interior classes are nondegenerate
  bool all_nondegenerate = false;
  bool degenerate_family = false;
  bool ambiguous_clusters = false;
};

CensusVerdict verify_counts(const std::vector<OrbitRecord>& records,
                            const std::vector<OrbitClass>& classes, int n_dof,
                            bool system_is_c2);

struct AgreementReport {
  bool agree = false;
  int n_a = 0, n_b = 0;       // class counts of the two sides
  int n_matched = 0;          // classes containing members from both sides
};

// Do two record sets induce the same class partition at metric_tol?
AgreementReport compare_class_sets(const std::vector<OrbitRecord>& a,
                                   const std::vector<OrbitRecord>& b, double metric_tol = 1e-4);

}  // namespace pblab
