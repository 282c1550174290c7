#include "pblab/hamiltonian.hpp"

#include <cmath>

#include "pblab/rng.hpp"

namespace pblab {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void require_known_params(const std::map<std::string, double>& params,
                          std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw ConstructionError("unknown system parameter '" + key + "'");
  }
}

// C2 smoothstep: q(0)=0, q(1)=1, q'=q''=0 at both ends.
double smoothstep(double u) {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double smoothstep_d1(double u) {
  if (u <= 0 || u >= 1) return 0.0;
  const double v = u * (1.0 - u);
  return 30.0 * v * v;
}
double smoothstep_d2(double u) {
  if (u <= 0 || u >= 1) return 0.0;
  return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

// Sum of independent pendula plus optional nearest-neighbour coupling:
//   H = sum_i (y_i^2/2 + eps (1 - cos x_i)) + gamma sum_i (1 - cos(x_i - x_{i+1}))
HamiltonianSystem pendulum_chain(int n, double period, double eps, double gamma) {
  HamiltonianSystem sys;
  sys.n_dof = n;
  sys.period = period;
  sys.smoothness = Smoothness::C2;
  sys.name = gamma == 0.0 ? "decoupled-pendulum" : "coupled-pendulum";

  sys.eval = [n, eps, gamma](double, const Vec& z) {
    double h = 0.0;
    for (int i = 0; i < n; ++i) h += 0.5 * z[n + i] * z[n + i] + eps * (1.0 - std::cos(z[i]));
    for (int i = 0; i + 1 < n; ++i) h += gamma * (1.0 - std::cos(z[i] - z[i + 1]));
    return h;
  };
  sys.grad = [n, eps, gamma](double, const Vec& z, Vec& g) {
    g.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      g[i] = eps * std::sin(z[i]);
      g[n + i] = z[n + i];
    }
    for (int i = 0; i + 1 < n; ++i) {
      const double s = gamma * std::sin(z[i] - z[i + 1]);
      g[i] += s;
      g[i + 1] -= s;
    }
  };
  sys.hess = [n, eps, gamma](double, const Vec& z, Mat& h) {
    h = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      h(i, i) = eps * std::cos(z[i]);
      h(n + i, n + i) = 1.0;
    }
    for (int i = 0; i + 1 < n; ++i) {
      const double c = gamma * std::cos(z[i] - z[i + 1]);
      h(i, i) += c;
      h(i + 1, i + 1) += c;
      h(i, i + 1) -= c;
      h(i + 1, i) -= c;
    }
  };
  return sys;
}

// Pendulum core blended into the saturating szumod tail.  The blend window
// lives strictly inside |y| < r0 so that H == tail(y) holds exactly (in
// floating point) on |y| >= r0.
HamiltonianSystem szumod_family(int n, double period, double eps, const SzumodProfile& prof) {
  HamiltonianSystem sys;
  sys.n_dof = n;
  sys.period = period;
  sys.smoothness = Smoothness::C2;
  sys.name = "szumod-family";

  const double a = 0.36 * prof.r0 * prof.r0;  // (0.6 r0)^2
  const double b = 0.81 * prof.r0 * prof.r0;  // (0.9 r0)^2
  const double inv_w = 1.0 / (b - a);

  auto core_eval = [n, eps](const Vec& z) {
    double h = 0.0;
    for (int i = 0; i < n; ++i) h += 0.5 * z[n + i] * z[n + i] + eps * (1.0 - std::cos(z[i]));
    return h;
  };

  sys.eval = [n, a, inv_w, prof, core_eval](double, const Vec& z) {
    const double u = (z.tail(n).squaredNorm() - a) * inv_w;
    const double chi = 1.0 - smoothstep(u);
    const Vec y = z.tail(n);
    if (chi == 0.0) return prof.tail(y);
    if (chi == 1.0) return core_eval(z);
    return chi * core_eval(z) + (1.0 - chi) * prof.tail(y);
  };
  sys.grad = [n, eps, a, inv_w, prof, core_eval](double, const Vec& z, Vec& g) {
    const Vec y = z.tail(n);
    const double u = (y.squaredNorm() - a) * inv_w;
    const double chi = 1.0 - smoothstep(u);
    g.resize(2 * n);
    if (chi == 0.0) {
      g.head(n).setZero();
      g.tail(n) = prof.tail_grad(y);
      return;
    }
    for (int i = 0; i < n; ++i) {
      g[i] = chi * eps * std::sin(z[i]);
      g[n + i] = chi * z[n + i];
    }
    if (chi < 1.0) {
      const double dchi = -smoothstep_d1(u) * inv_w;  // d chi / d(|y|^2)
      const double gap = core_eval(z) - prof.tail(y);
      g.tail(n) += (1.0 - chi) * prof.tail_grad(y) + (2.0 * dchi * gap) * y;
    }
  };
  sys.hess = [n, eps, a, inv_w, prof, core_eval](double, const Vec& z, Mat& h) {
    const Vec y = z.tail(n);
    const double u = (y.squaredNorm() - a) * inv_w;
    const double chi = 1.0 - smoothstep(u);
    h = Mat::Zero(2 * n, 2 * n);
    if (chi == 0.0) {
      h.bottomRightCorner(n, n) = prof.tail_hess(y);
      return;
    }
    for (int i = 0; i < n; ++i) {
      h(i, i) = chi * eps * std::cos(z[i]);
      h(n + i, n + i) = chi;
    }
    if (chi < 1.0) {
      const double dchi = -smoothstep_d1(u) * inv_w;
      const double ddchi = -smoothstep_d2(u) * inv_w * inv_w;
      const double gap = core_eval(z) - prof.tail(y);
      // gradient gap between the two blended pieces
      Vec dg_x(n), dg_y(n);
      for (int i = 0; i < n; ++i) {
        dg_x[i] = eps * std::sin(z[i]);
        dg_y[i] = z[n + i];
      }
      dg_y -= prof.tail_grad(y);
      h.bottomRightCorner(n, n) += (1.0 - chi) * prof.tail_hess(y);
      h.bottomRightCorner(n, n) += (4.0 * ddchi * gap) * (y * y.transpose());
      h.bottomRightCorner(n, n) += (2.0 * dchi * gap) * Mat::Identity(n, n);
      h.bottomRightCorner(n, n) += (2.0 * dchi) * (y * dg_y.transpose() + dg_y * y.transpose());
      h.topRightCorner(n, n) += (2.0 * dchi) * (dg_x * y.transpose());
      h.bottomLeftCorner(n, n) += (2.0 * dchi) * (y * dg_x.transpose());
    }
  };
  return sys;
}

}  // namespace

HamiltonianSystem builtin_system(const std::string& name, const std::map<std::string, double>& params) {
  const int n = static_cast<int>(get_param(params, "n", 2));
  const double period = get_param(params, "period", 1.0);
  const double eps = get_param(params, "epsilon", 0.1);
  const bool reversed = get_param(params, "reversed", 0.0) != 0.0;
  if (n < 1) throw ConstructionError("system needs n >= 1 degrees of freedom");
  if (period <= 0) throw ConstructionError("system period must be positive");

  HamiltonianSystem sys;
  if (name == "decoupled-pendulum") {
    require_known_params(params, {"n", "period", "epsilon", "reversed"});
    sys = pendulum_chain(n, period, eps, 0.0);
  } else if (name == "coupled-pendulum") {
    require_known_params(params, {"n", "period", "epsilon", "coupling", "reversed"});
    sys = pendulum_chain(n, period, eps, get_param(params, "coupling", 0.05));
  } else if (name == "szumod-family") {
    require_known_params(params, {"n", "period", "epsilon", "r0", "ell", "c", "reversed"});
    SzumodProfile prof;
    prof.r0 = get_param(params, "r0", 3.0);
    prof.ell = get_param(params, "ell", 1.0);
    prof.c = get_param(params, "c", 1.0);
    if (prof.r0 <= 0) throw ConstructionError("szumod r0 must be positive");
    sys = szumod_family(n, period, eps, prof);
  } else {
    throw ConstructionError("unknown system '" + name + "'");
  }
  return reversed ? reversed_momentum(sys) : sys;
}

HamiltonianSystem reversed_momentum(const HamiltonianSystem& sys) {
  HamiltonianSystem r;
  r.n_dof = sys.n_dof;
  r.period = sys.period;
  r.smoothness = sys.smoothness;
  r.name = sys.name + "-reversed";
  const int n = sys.n_dof;

  auto flip = [n](const Vec& z) {
    Vec w = z;
    w.tail(n) = -w.tail(n);
    return w;
  };
  // Hr(t, x, y) = -H(t, x, -y); (x(t), -y(t)) solves the reversed system.
  r.eval = [sys, flip](double t, const Vec& z) { return -sys.eval(t, flip(z)); };
  r.grad = [sys, flip, n](double t, const Vec& z, Vec& g) {
    sys.grad(t, flip(z), g);
    g.head(n) = -g.head(n);
  };
  if (sys.hess) {
    r.hess = [sys, flip, n](double t, const Vec& z, Mat& h) {
      sys.hess(t, flip(z), h);
      h.topLeftCorner(n, n) = -h.topLeftCorner(n, n);
      h.bottomRightCorner(n, n) = -h.bottomRightCorner(n, n);
    };
  }
  return r;
}

AdmissibilityReport check_admissible(const HamiltonianSystem& sys, int n_samples, double tol,
                                     std::uint64_t seed) {
  Rng rng(seed);
  const int n = sys.n_dof;
  AdmissibilityReport rep;
  rep.n_samples = n_samples;

  Vec g, gp, gm;
  Mat hmat;
  for (int s = 0; s < n_samples; ++s) {
    const double t = rng.uniform(0.0, sys.period);
    Vec z(2 * n);
    z.head(n) = rng.uniform_vec(n, -two_pi, two_pi);
    z.tail(n) = rng.uniform_vec(n, -5.0, 5.0);

    const double h0 = sys.eval(t, z);
    for (int i = 0; i < n; ++i) {
      Vec zs = z;
      zs[i] += two_pi;
      rep.periodicity_defect = std::max(rep.periodicity_defect, std::abs(sys.eval(t, zs) - h0));
    }

    sys.grad(t, z, g);
    const double gscale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    for (int i = 0; i < 2 * n; ++i) {
      // 4th-order stencil with a small step: families that are only C^2 keep
      // an O(h^2) error when the stencil straddles a blend knot, so the step
      // has to be small; the higher order keeps the smooth regions exact and
      // the roundoff floor eps/h stays near 1e-11
      const double step = 1e-5 * std::max(1.0, std::abs(z[i]));
      Vec z1 = z, z2 = z, z3 = z, z4 = z;
      z1[i] -= 2 * step;
      z2[i] -= step;
      z3[i] += step;
      z4[i] += 2 * step;
      const double fd =
          (sys.eval(t, z1) - 8.0 * sys.eval(t, z2) + 8.0 * sys.eval(t, z3) - sys.eval(t, z4)) /
          (12.0 * step);
      rep.gradient_defect = std::max(rep.gradient_defect, std::abs(g[i] - fd) / gscale);
    }

    if (sys.has_hessian() && s % 8 == 0) {  // Hessian audit is 4N^2 evals, thin it out
      sys.hess(t, z, hmat);
      const double hscale = std::max(1.0, hmat.lpNorm<Eigen::Infinity>());
      for (int j = 0; j < 2 * n; ++j) {
        const double step = 2e-6 * std::max(1.0, std::abs(z[j]));
        Vec zp = z, zm = z;
        zp[j] += step;
        zm[j] -= step;
        sys.grad(t, zp, gp);
        sys.grad(t, zm, gm);
        for (int i = 0; i < 2 * n; ++i) {
          const double fd = (gp[i] - gm[i]) / (2.0 * step);
          rep.hessian_defect = std::max(rep.hessian_defect, std::abs(hmat(i, j) - fd) / hscale);
        }
      }
    }
  }
  rep.pass = rep.periodicity_defect < tol && rep.gradient_defect < tol;
  return rep;
}

}  // namespace pblab
