#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pblab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double two_pi = 6.283185307179586476925286766559;

// Phase-space point split into angle-like and momentum-like halves.
// The flat state layout used everywhere else is z = (x_0..x_{N-1}, y_0..y_{N-1}).
struct PhasePoint {
  Vec x;
  Vec y;

  PhasePoint() = default;
  PhasePoint(Vec x_, Vec y_) : x(std::move(x_)), y(std::move(y_)) {}

  int dof() const { return static_cast<int>(x.size()); }

  Vec state() const {
    Vec z(x.size() + y.size());
    z << x, y;
    return z;
  }
  static PhasePoint from_state(const Vec& z) {
    const int n = static_cast<int>(z.size()) / 2;
    return PhasePoint(z.head(n), z.tail(n));
  }
};

// Apply the standard symplectic matrix: J (x, y) = (y, -x).
inline void apply_J(const Vec& v, Vec& out) {
  const int n = static_cast<int>(v.size()) / 2;
  out.resize(2 * n);
  out.head(n) = v.tail(n);
  out.tail(n) = -v.head(n);
}

inline Vec apply_J(const Vec& v) {
  Vec out;
  apply_J(v, out);
  return out;
}

// Reduce each component into [0, 2*pi).
inline Vec wrap_angles(const Vec& x) {
  Vec w = x;
  for (int i = 0; i < w.size(); ++i) {
    w[i] = std::fmod(w[i], two_pi);
    if (w[i] < 0) w[i] += two_pi;
  }
  return w;
}

// Nearest lattice vector 2*pi*m to d, returned as integer multiples m.
inline Eigen::VectorXi nearest_lattice(const Vec& d) {
  Eigen::VectorXi m(d.size());
  for (int i = 0; i < d.size(); ++i) m[i] = static_cast<int>(std::lround(d[i] / two_pi));
  return m;
}

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the adaptive integrator cannot continue; carries how far it got.
struct IntegrationError : std::runtime_error {
  double last_time;
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), last_time(t) {}
};

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degree computation did not stabilise under resolution doubling.
struct UnreliableResultError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed-point reduction rejected: observed contraction factor >= 1.
struct ReductionError : std::runtime_error {
  double factor;
  ReductionError(const std::string& what, double f) : std::runtime_error(what), factor(f) {}
};

}  // namespace pblab
