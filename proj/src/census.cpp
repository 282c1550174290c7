#include "pblab/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pblab/parallel.hpp"
#include "pblab/rng.hpp"

namespace pblab {

namespace {

// pairwise orbit distance: lattice-shifted initial condition + trajectory
// agreement at the comparison times; returns the worse of the two
double orbit_metric(const OrbitRecord& a, const OrbitRecord& b) {
  const int n = static_cast<int>(a.z0.size()) / 2;
  Vec d0 = a.z0 - b.z0;
  const Eigen::VectorXi m = nearest_lattice(d0.head(n));
  for (int i = 0; i < n; ++i) d0[i] -= two_pi * m[i];
  double dist = d0.norm();
  for (int r = 0; r < a.comparison.rows(); ++r) {
    Vec dr = (a.comparison.row(r) - b.comparison.row(r)).transpose();
    for (int i = 0; i < n; ++i) dr[i] -= two_pi * m[i];
    dist = std::max(dist, dr.norm());
  }
  return dist;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

}  // namespace

OrbitRecord make_orbit_record(const HamiltonianSystem& sys, const Vec& z0_raw,
                              const std::string& source, double integrator_tol,
                              double nondeg_threshold) {
  const int n = sys.n_dof;
  OrbitRecord rec;
  rec.source = source;

  rec.z0 = z0_raw;
  rec.z0.head(n) = wrap_angles(z0_raw.head(n));

  Trajectory traj = flow_trajectory(sys, rec.z0, 0.0, sys.period, integrator_tol);
  const Vec zT = traj.final_state();
  rec.winding = nearest_lattice(zT.head(n) - rec.z0.head(n));
  Vec F = zT - rec.z0;
  for (int i = 0; i < n; ++i) F[i] -= two_pi * rec.winding[i];
  rec.residual = F.norm();

  rec.comparison = Mat(kComparisonTimes, 2 * n);
  for (int j = 0; j < kComparisonTimes; ++j) {
    const double t = sys.period * (j + 1.0) / (kComparisonTimes + 1.0);
    rec.comparison.row(j) = traj.eval(t).transpose();
  }

  if (sys.smoothness == Smoothness::C2) {
    MonodromyResult mr = monodromy(sys, rec.z0, integrator_tol, nondeg_threshold, 1e-5);
    rec.multipliers = mr.multipliers;
    rec.stability_margin = mr.margin;
    rec.nondegenerate = mr.nondegenerate;
    rec.degenerate_flag = !mr.nondegenerate;
  }
  return rec;
}

std::vector<OrbitClass> cluster_distinct(const std::vector<OrbitRecord>& records,
                                         double metric_tol) {
  const int n = static_cast<int>(records.size());
  UnionFind uf(n);
  std::vector<std::pair<int, int>> grey;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = orbit_metric(records[i], records[j]);
      if (d < metric_tol) {
        uf.unite(i, j);
      } else if (d < 2.0 * metric_tol) {
        grey.emplace_back(i, j);
        uf.unite(i, j);  // conservative: grey-zone pairs collapse into one class
      }
    }

  std::vector<OrbitClass> classes;
  std::vector<int> root_to_class(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_to_class[r] < 0) {
      root_to_class[r] = static_cast<int>(classes.size());
      classes.push_back({});
    }
    OrbitClass& cls = classes[root_to_class[r]];
    cls.members.push_back(i);
    if (cls.representative < 0 || lex_less(records[i].z0, records[cls.representative].z0))
      cls.representative = i;
  }
  for (const auto& [i, j] : grey) {
    const int c = root_to_class[uf.find(i)];
    if (c >= 0) classes[c].ambiguous = true;
  }
  return classes;
}

std::vector<OrbitRecord> oracle_fixed_points(const HamiltonianSystem& sys, const EmbeddedSphere& S,
                                             const OracleOptions& opt) {
  const int n = sys.n_dof;
  const int g = opt.grid_per_dim;

  // phase-space grid: x on the torus lattice, y on a lattice clipped to int S
  std::vector<Vec> ys;
  {
    const double R = S.bounding_radius;
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec y(n);
      for (int i = 0; i < n; ++i)
        y[i] = S.center_hint[i] + R * (2.0 * (idx[i] + 0.5) / g - 1.0);
      if (S.f(y) < 0) ys.push_back(y);
      int carry = 0;
      while (carry < n && ++idx[carry] == g) idx[carry++] = 0;
      if (carry == n) break;
    }
  }
  std::vector<Vec> xs;
  {
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = two_pi * idx[i] / g;
      xs.push_back(x);
      int carry = 0;
      while (carry < n && ++idx[carry] == g) idx[carry++] = 0;
      if (carry == n) break;
    }
  }

  struct Cell {
    Vec z0;
    double score = 0.0;
  };
  const long total = static_cast<long>(xs.size()) * static_cast<long>(ys.size());
  const long scan = std::min<long>(total, opt.budget);
  std::vector<Cell> cells(scan);
  parallel_for(static_cast<int>(scan), [&](int c) {
    const Vec& x = xs[c % xs.size()];
    const Vec& y = ys[c / xs.size()];
    Vec z0(2 * n);
    z0 << x, y;
    cells[c].z0 = z0;
    try {
      PoincareResult pr = poincare_map(sys, z0, opt.integrator_tol);
      Vec F = pr.z_final - z0;
      const Eigen::VectorXi k = nearest_lattice(F.head(n));
      for (int i = 0; i < n; ++i) F[i] -= two_pi * k[i];
      cells[c].score = F.norm();
    } catch (const IntegrationError&) {
      cells[c].score = std::numeric_limits<double>::infinity();
    }
  });

  std::vector<int> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cells[a].score < cells[b].score; });

  const int refine = std::min<int>(opt.refine_top, static_cast<int>(order.size()));
  std::vector<OrbitRecord> found;
  std::vector<ShootingResult> shots(refine);
  parallel_for(refine, [&](int j) {
    shots[j] = refine_periodic(sys, cells[order[j]].z0, opt.newton_tol, 40, opt.integrator_tol);
  });
  for (int j = 0; j < refine; ++j) {
    const auto& sr = shots[j];
    if (!sr.converged) continue;
    OrbitRecord rec = make_orbit_record(sys, sr.z0, "oracle", opt.integrator_tol,
                                        opt.nondeg_threshold);
    if (sr.singular_jacobian) rec.degenerate_flag = true;
    rec.interior = S.inside(rec.z0.tail(n));
    found.push_back(std::move(rec));
  }

  // collapse duplicates found from different cells
  const auto classes = cluster_distinct(found, opt.metric_tol);
  std::vector<OrbitRecord> unique;
  unique.reserve(classes.size());
  for (const auto& cls : classes) {
    OrbitRecord rec = found[cls.representative];
    for (int m : cls.members) rec.degenerate_flag = rec.degenerate_flag || found[m].degenerate_flag;
    unique.push_back(std::move(rec));
  }
  std::sort(unique.begin(), unique.end(),
            [](const OrbitRecord& a, const OrbitRecord& b) { return lex_less(a.z0, b.z0); });
  return unique;
}

CensusVerdict verify_counts(const std::vector<OrbitRecord>& records,
                            const std::vector<OrbitClass>& classes, int n_dof,
                            bool system_is_c2) {
  CensusVerdict v;
  v.n_classes = static_cast<int>(classes.size());
  v.cuplength_bound = n_dof + 1;
  v.betti_bound = 1 << n_dof;

  v.all_nondegenerate = true;
  for (const auto& cls : classes) {
    const OrbitRecord& rep = records[cls.representative];
    if (cls.ambiguous) v.ambiguous_clusters = true;
    bool interior = false;
    for (int m : cls.members) interior = interior || records[m].interior;
    if (interior) {
      ++v.n_interior;
      if (!rep.nondegenerate) v.all_nondegenerate = false;
    }
    for (int m : cls.members)
      if (records[m].degenerate_flag && records[m].interior) v.degenerate_family = true;
  }
  v.meets_cuplength = v.n_interior >= v.cuplength_bound;
  v.meets_betti = system_is_c2 && v.all_nondegenerate && !v.degenerate_family &&
                  v.n_interior >= v.betti_bound;
  return v;
}

AgreementReport compare_class_sets(const std::vector<OrbitRecord>& a,
                                   const std::vector<OrbitRecord>& b, double metric_tol) {
  AgreementReport rep;
  rep.n_a = static_cast<int>(cluster_distinct(a, metric_tol).size());
  rep.n_b = static_cast<int>(cluster_distinct(b, metric_tol).size());

  std::vector<OrbitRecord> merged;
  merged.reserve(a.size() + b.size());
  for (auto rec : a) {
    rec.source = "a";
    merged.push_back(std::move(rec));
  }
  for (auto rec : b) {
    rec.source = "b";
    merged.push_back(std::move(rec));
  }
  const auto classes = cluster_distinct(merged, metric_tol);
  for (const auto& cls : classes) {
    bool has_a = false, has_b = false;
    for (int m : cls.members) {
      if (merged[m].source == "a") has_a = true;
      if (merged[m].source == "b") has_b = true;
    }
    if (has_a && has_b) ++rep.n_matched;
  }
  rep.agree = rep.n_matched == static_cast<int>(classes.size()) && rep.n_a == rep.n_b &&
              rep.n_a == static_cast<int>(classes.size());
  return rep;
}

}  // namespace pblab
