#include "pblab/critical_search.hpp"

#include <algorithm>
#include <cmath>

#include "pblab/parallel.hpp"
#include "pblab/rng.hpp"

namespace pblab {

namespace {

// distance in (e, v) with v compared on the torus
double point_distance(const TruncatedLoopSpace& space, const Vec& ua, const Vec& ub) {
  const int de = space.dim_e();
  const int n = space.n_dof();
  double acc = (ua.head(de) - ub.head(de)).squaredNorm();
  for (int i = 0; i < n; ++i) {
    double dv = ua[de + i] - ub[de + i];
    dv -= two_pi * std::lround(dv / two_pi);
    acc += dv * dv;
  }
  return std::sqrt(acc);
}

struct Deflator {
  const TruncatedLoopSpace& space;
  const std::vector<Vec>& found;

  // m(u) = prod (1 + 1/d_j^2); also the log-gradient m'/m
  double factor(const Vec& u) const {
    double m = 1.0;
    for (const auto& w : found) {
      const double d2 = std::max(point_distance(space, u, w), 1e-12);
      m *= 1.0 + 1.0 / (d2 * d2);
    }
    return std::min(m, 1e12);
  }
  Vec log_grad(const Vec& u) const {
    Vec g = Vec::Zero(u.size());
    const int de = space.dim_e();
    const int n = space.n_dof();
    for (const auto& w : found) {
      Vec diff = u - w;
      for (int i = 0; i < n; ++i)
        diff[de + i] -= two_pi * std::lround(diff[de + i] / two_pi);
      const double d = std::max(diff.norm(), 1e-12);
      const double d2 = d * d;
      // d/du of log(1 + 1/d^2) = -2 diff / (d^4 + d^2)
      g -= 2.0 * diff / (d2 * d2 + d2);
    }
    return g;
  }
};

struct NewtonOutcome {
  bool converged = false;
  Vec u;
  double residual = 0.0;
  int iters = 0;
};

NewtonOutcome newton_from(const ActionFunctional& af, const Vec& u_start, const Deflator& defl,
                          const SearchOptions& opt) {
  const TruncatedLoopSpace& space = af.space();
  const int dim = space.dim_total();
  const int de = space.dim_e();

  NewtonOutcome out;
  out.u = u_start;

  LoopPoint p{out.u.head(de), out.u.tail(space.n_dof())};
  Vec F = af.gradient(p);
  double fn = F.norm();

  for (int it = 0; it < opt.max_newton_iter; ++it) {
    out.iters = it;
    if (fn < opt.newton_tol) {
      out.converged = true;
      break;
    }
    const double m = defl.factor(out.u);
    const Vec mg = defl.log_grad(out.u);
    Mat J = m * af.hessian(p);
    // deflated residual mF has Jacobian m H + (m F) (m'/m)^T
    J.noalias() += (m * F) * mg.transpose();
    Vec rhs = -m * F;

    Vec step;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      Mat Jr = J;
      if (ridge > 0) Jr.diagonal().array() += ridge;
      Eigen::PartialPivLU<Mat> lu(Jr);
      step = lu.solve(rhs);
      if (step.allFinite() && (Jr * step - rhs).norm() < 1e-6 * std::max(1.0, rhs.norm())) break;
      ridge = ridge == 0.0 ? 1e-10 : ridge * 100;
      step.setZero();
    }
    if (step.norm() == 0.0) break;
    if (step.norm() > 2.0) step *= 2.0 / step.norm();

    // backtrack on the deflated residual so the iteration is pushed away
    // from already-found points
    const double defl_fn = m * fn;
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls) {
      Vec u_try = out.u + alpha * step;
      LoopPoint p_try{u_try.head(de), u_try.tail(space.n_dof())};
      Vec F_try = af.gradient(p_try);
      const double m_try = defl.factor(u_try);
      if (F_try.allFinite() &&
          (m_try * F_try.norm() < defl_fn * (1.0 - 1e-4 * alpha) || F_try.norm() < opt.newton_tol)) {
        out.u = u_try;
        p = p_try;
        F = F_try;
        fn = F.norm();
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  if (!out.converged && fn < opt.newton_tol) out.converged = true;
  out.residual = fn;
  return out;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const ActionFunctional& af,
                                                const SearchOptions& opt,
                                                const std::vector<LoopPoint>& hints) {
  const TruncatedLoopSpace& space = af.space();
  const int n = space.n_dof();
  const int de = space.dim_e();
  const int dim = space.dim_total();

  // deterministic seed list
  std::vector<Vec> seeds;
  for (const auto& h : hints) {
    Vec u(dim);
    u << h.e, h.v;
    seeds.push_back(u);
  }
  {
    // half-period lattice {0, pi}^N with zero oscillation
    const int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
      Vec u = Vec::Zero(dim);
      for (int i = 0; i < n; ++i) u[de + i] = (c >> i) & 1 ? 3.141592653589793 : 0.0;
      seeds.push_back(u);
    }
  }
  {
    // uniform torus grid, e = 0
    int g = std::max(2, static_cast<int>(std::floor(std::pow(opt.budget / 3.0, 1.0 / n))));
    g = std::min(g, 8);
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec u = Vec::Zero(dim);
      for (int i = 0; i < n; ++i) u[de + i] = two_pi * (idx[i] + 0.5) / g;
      seeds.push_back(u);
      int carry = 0;
      while (carry < n && ++idx[carry] == g) idx[carry++] = 0;
      if (carry == n) break;
    }
  }
  Rng rng(opt.seed);
  while (static_cast<int>(seeds.size()) < opt.budget) {
    Vec u(dim);
    u.head(de) = opt.seed_scale * rng.gaussian_vec(de) / std::sqrt(static_cast<double>(de));
    u.tail(n) = rng.uniform_vec(n, 0.0, two_pi);
    seeds.push_back(u);
  }
  if (static_cast<int>(seeds.size()) > opt.budget)
    seeds.resize(std::max<size_t>(opt.budget, hints.size() + (1u << n)));

  std::vector<CriticalPoint> found;
  std::vector<Vec> found_u;

  // fixed batch size: the deflation snapshot seen by a seed must not depend
  // on how many workers happen to be available
  const int batch = 16;
  for (size_t start = 0; start < seeds.size(); start += batch) {
    const int count = static_cast<int>(std::min<size_t>(batch, seeds.size() - start));
    std::vector<NewtonOutcome> outcomes(count);
    Deflator defl{space, found_u};
    parallel_for(count, [&](int j) { outcomes[j] = newton_from(af, seeds[start + j], defl, opt); });

    // merge in seed order so the result set is worker-count independent
    for (int j = 0; j < count; ++j) {
      auto& oc = outcomes[j];
      if (!oc.converged) continue;
      for (int i = 0; i < n; ++i) {
        double& vi = oc.u[de + i];
        vi = std::fmod(vi, two_pi);
        if (vi < 0) vi += two_pi;
      }
      bool fresh = true;
      for (const auto& w : found_u)
        if (point_distance(space, oc.u, w) < opt.dedup_tol) {
          fresh = false;
          break;
        }
      if (!fresh) continue;
      CriticalPoint cp;
      cp.p = LoopPoint{oc.u.head(de), oc.u.tail(n)};
      cp.residual = oc.residual;
      cp.newton_iters = oc.iters;
      cp.value = af.value(cp.p);
      found.push_back(cp);
      found_u.push_back(oc.u);
    }
  }

  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.residual < b.residual;
  });
  return found;
}

}  // namespace pblab
