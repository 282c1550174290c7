#include "pblab/rays.hpp"

#include <algorithm>

#include "pblab/parallel.hpp"

namespace pblab {

RaysReport check_avoiding_rays(const HamiltonianSystem& sys, const EmbeddedSphere& S, RaySide side,
                               const RaysOptions& opt) {
  const int n = sys.n_dof;
  if (S.dim != n) throw ConstructionError("sphere dimension does not match the system");

  RaysReport rep;
  rep.side = side;
  rep.n_boundary = opt.n_boundary;
  rep.n_angles = opt.n_angles;
  rep.n_interior = opt.n_interior;

  Rng rng(opt.seed);
  std::vector<Vec> bases(opt.n_angles);
  for (auto& x0 : bases) x0 = rng.uniform_vec(n, 0.0, two_pi);

  const std::vector<Vec> boundary = sample_boundary(S, opt.n_boundary, opt.seed ^ 0xb0b0);
  const std::vector<Vec> interior = sample_interior(S, opt.n_interior, opt.seed ^ 0x1717);

  const double sign = side == RaySide::Outward ? 1.0 : -1.0;
  const int total = static_cast<int>(boundary.size()) * opt.n_angles;
  std::vector<RaySample> samples(total);
  std::vector<std::string> failures(total);

  parallel_for(total, [&](int idx) {
    const int bi = idx / opt.n_angles;
    const int ai = idx % opt.n_angles;
    RaySample& s = samples[idx];
    s.y0 = boundary[bi];
    s.x0 = bases[ai];
    Vec z0(2 * n);
    z0 << s.x0, s.y0;
    try {
      const Vec nu = S.normal(s.y0);
      PoincareResult pr = poincare_map(sys, z0, opt.integrator_tol);
      s.theta = pr.theta;
      s.margin = ray_distance(s.theta, sign * nu) / std::max(s.theta.norm(), 1.0);
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  });

  for (int idx = 0; idx < total; ++idx) {
    if (!failures[idx].empty()) {
      rep.verifiable = false;
      rep.failure_note = "solution from a boundary sample did not reach t = T: " + failures[idx];
      break;
    }
  }

  // definedness probes from the interior; these carry no margin, they only
  // have to reach t = T
  if (rep.verifiable) {
    std::vector<std::string> int_failures(interior.size());
    parallel_for(static_cast<int>(interior.size()), [&](int i) {
      Vec z0(2 * n);
      z0 << bases[i % opt.n_angles], interior[i];
      try {
        poincare_map(sys, z0, opt.integrator_tol);
      } catch (const std::exception& e) {
        int_failures[i] = e.what();
      }
    });
    for (const auto& f : int_failures) {
      if (!f.empty()) {
        rep.verifiable = false;
        rep.failure_note = "solution from an interior sample did not reach t = T: " + f;
        break;
      }
    }
  }

  if (!rep.verifiable) {
    rep.verdict = false;
    return rep;
  }

  std::vector<RaySample> sorted = samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const RaySample& a, const RaySample& b) { return a.margin < b.margin; });
  rep.min_margin = sorted.front().margin;
  rep.max_margin = sorted.back().margin;
  const int keep = std::min<int>(opt.keep_worst, static_cast<int>(sorted.size()));
  rep.worst.assign(sorted.begin(), sorted.begin() + keep);
  rep.verdict = rep.min_margin > opt.margin_tol;
  return rep;
}

}  // namespace pblab
