#pragma once

#include <functional>
#include <map>
#include <string>

#include "pblab/types.hpp"

namespace pblab {

enum class Smoothness { C1, C2 };

// Time-periodic Hamiltonian H(t, x, y), 2*pi-periodic in every x component.
// The induced vector field is z' = J grad H = (dH/dy, -dH/dx).
//
// grad/hess take the flat state z = (x, y) and write into preallocated
// output (these sit in the integrator's inner loop).  hess may be empty;
// callers that need second derivatives must check has_hessian().
struct HamiltonianSystem {
  int n_dof = 0;
  double period = 1.0;
  Smoothness smoothness = Smoothness::C2;
  std::string name;

  std::function<double(double, const Vec&)> eval;
  std::function<void(double, const Vec&, Vec&)> grad;
  std::function<void(double, const Vec&, Mat&)> hess;

  bool has_hessian() const { return static_cast<bool>(hess); }

  Mat hessian(double t, const Vec& z) const {
    if (!hess) throw CapabilityError("system '" + name + "' has no Hessian");
    Mat h;
    hess(t, z, h);
    return h;
  }
};

// Right-hand side of the Hamiltonian ODE at (t, z).
inline void symplectic_field(const HamiltonianSystem& sys, double t, const Vec& z, Vec& out) {
  thread_local Vec g;
  sys.grad(t, z, g);
  const int n = sys.n_dof;
  out.resize(2 * n);
  out.head(n) = g.tail(n);
  out.tail(n) = -g.head(n);
}

inline Vec symplectic_field(const HamiltonianSystem& sys, double t, const Vec& z) {
  Vec out;
  symplectic_field(sys, t, z, out);
  return out;
}

struct AdmissibilityReport {
  double periodicity_defect = 0.0;  // max |H(t, x + 2*pi*e_i, y) - H(t, x, y)|
  double gradient_defect = 0.0;     // max relative gradient/FD mismatch
  double hessian_defect = 0.0;      // same for the Hessian, if present
  int n_samples = 0;
  bool pass = false;
};

// Randomised admissibility audit: x-periodicity of H and consistency of the
// supplied derivatives against central finite differences.
AdmissibilityReport check_admissible(const HamiltonianSystem& sys, int n_samples, double tol,
                                     std::uint64_t seed = 42);

// Built-in families; `params` keys depend on the family (see builtin_params).
HamiltonianSystem builtin_system(const std::string& name, const std::map<std::string, double>& params);

// Momentum reversal: Hr(t, x, y) = -H(t, x, -y).  Maps solutions (x, y) of H
// to solutions (x, -y) of Hr, so inward- and outward-pointing displacement
// fields trade places.
HamiltonianSystem reversed_momentum(const HamiltonianSystem& sys);

// Saturating far-field profile of the szumod family: the full Hamiltonian
// equals tail(y) for |y| >= r0, with tail -> ell at infinity and first and
// second derivatives decaying to zero.
struct SzumodProfile {
  double r0 = 3.0;
  double ell = 1.0;
  double c = 1.0;

  double tail(const Vec& y) const { return ell - c / (1.0 + y.squaredNorm()); }
  Vec tail_grad(const Vec& y) const {
    const double d = 1.0 + y.squaredNorm();
    return (2.0 * c / (d * d)) * y;
  }
  Mat tail_hess(const Vec& y) const {
    const double d = 1.0 + y.squaredNorm();
    const int n = static_cast<int>(y.size());
    Mat h = (2.0 * c / (d * d)) * Mat::Identity(n, n);
    h -= (8.0 * c / (d * d * d)) * (y * y.transpose());
    return h;
  }
};

}  // namespace pblab
