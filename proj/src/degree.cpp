#include "pblab/degree.hpp"

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "pblab/parallel.hpp"

namespace pblab {

namespace {

struct TriMesh {
  std::vector<Vec> verts;  // unit directions
  std::vector<std::array<int, 3>> faces;
};

TriMesh icosahedron() {
  const double p = 0.5 * (1.0 + std::sqrt(5.0));
  const double raw[12][3] = {{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0},
                             {0, -1, p}, {0, 1, p},  {0, -1, -p}, {0, 1, -p},
                             {p, 0, -1}, {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
  const int f[20][3] = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  TriMesh m;
  for (auto& v : raw) {
    Vec u(3);
    u << v[0], v[1], v[2];
    m.verts.push_back(u / u.norm());
  }
  for (auto& t : f) {
    std::array<int, 3> face = {t[0], t[1], t[2]};
    // enforce outward orientation: det of the vertex triple positive
    Mat d(3, 3);
    d.col(0) = m.verts[face[0]];
    d.col(1) = m.verts[face[1]];
    d.col(2) = m.verts[face[2]];
    if (d.determinant() < 0) std::swap(face[1], face[2]);
    m.faces.push_back(face);
  }
  return m;
}

TriMesh subdivide(const TriMesh& in) {
  TriMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec v = out.verts[a] + out.verts[b];
    v /= v.norm();
    out.verts.push_back(v);
    const int idx = static_cast<int>(out.verts.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({ab, f[1], bc});
    out.faces.push_back({ca, bc, f[2]});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

// van Oosterom-Strackee signed solid angle of the triangle (a,b,c) seen
// from the origin.
double solid_angle(const Vec& a, const Vec& b, const Vec& c) {
  Mat m(3, 3);
  m.col(0) = a;
  m.col(1) = b;
  m.col(2) = c;
  const double na = a.norm(), nb = b.norm(), nc = c.norm();
  const double den = na * nb * nc + a.dot(b) * nc + b.dot(c) * na + c.dot(a) * nb;
  return 2.0 * std::atan2(m.determinant(), den);
}

double turn_angle(const Vec& w0, const Vec& w1) {
  const double cross = w0[0] * w1[1] - w0[1] * w1[0];
  const double dot = w0.dot(w1);
  return std::atan2(cross, dot);
}

struct WindingWalker {
  const VectorMap& map;
  const EmbeddedSphere& S;
  double tiny;

  Vec snap(Vec p) const {
    for (int i = 0; i < 3; ++i) {
      const Vec g = S.f_grad(p);
      p -= S.f(p) * g / g.squaredNorm();
    }
    return p;
  }

  double turn(const Vec& p, const Vec& wp, const Vec& q, const Vec& wq, int depth) const {
    if (wp.norm() < tiny || wq.norm() < tiny)
      throw UnreliableResultError("boundary image passes through zero");
    const double d = turn_angle(wp, wq);
    if (std::abs(d) <= 1.5707963267948966) return d;
    if (depth <= 0) throw UnreliableResultError("winding refinement exhausted");
    const Vec m = snap(0.5 * (p + q));
    const Vec wm = map(m);
    return turn(p, wp, m, wm, depth - 1) + turn(m, wm, q, wq, depth - 1);
  }
};

int degree_1d(const VectorMap& map, const EmbeddedSphere& S) {
  Vec up(1), dn(1);
  up << 1.0;
  dn << -1.0;
  const Vec b = cast_to_boundary(S, up), a = cast_to_boundary(S, dn);
  const double fb = map(b)[0], fa = map(a)[0];
  if (fa == 0.0 || fb == 0.0) throw UnreliableResultError("map vanishes on the boundary");
  return ((fb > 0) - (fb < 0) - ((fa > 0) - (fa < 0))) / 2;
}

int degree_2d(const VectorMap& map, const EmbeddedSphere& S, int resolution) {
  const std::vector<Vec> poly = sample_boundary(S, resolution);
  std::vector<Vec> img(poly.size());
  parallel_for(static_cast<int>(poly.size()), [&](int i) { img[i] = map(poly[i]); });

  double scale = 0.0;
  for (const auto& w : img) scale = std::max(scale, w.norm());
  WindingWalker walker{map, S, 1e-12 * std::max(1.0, scale)};

  double total = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const size_t j = (i + 1) % poly.size();
    total += walker.turn(poly[i], img[i], poly[j], img[j], 24);
  }
  const double cycles = total / two_pi;
  const int deg = static_cast<int>(std::lround(cycles));
  if (std::abs(cycles - deg) > 0.05) throw UnreliableResultError("winding sum far from an integer");
  return deg;
}

int degree_3d(const VectorMap& map, const EmbeddedSphere& S, int resolution) {
  TriMesh mesh = icosahedron();
  int faces = 20;
  while (faces < resolution) {
    mesh = subdivide(mesh);
    faces *= 4;
  }
  std::vector<Vec> img(mesh.verts.size());
  parallel_for(static_cast<int>(mesh.verts.size()),
               [&](int i) { img[i] = map(cast_to_boundary(S, mesh.verts[i])); });
  double scale = 0.0;
  for (const auto& w : img) scale = std::max(scale, w.norm());
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    if (img[f[0]].norm() < 1e-12 * scale || img[f[1]].norm() < 1e-12 * scale ||
        img[f[2]].norm() < 1e-12 * scale)
      throw UnreliableResultError("boundary image passes through zero");
    total += solid_angle(img[f[0]], img[f[1]], img[f[2]]);
  }
  const double cycles = total / (2.0 * two_pi);
  const int deg = static_cast<int>(std::lround(cycles));
  if (std::abs(cycles - deg) > 0.05) throw UnreliableResultError("solid angle sum far from an integer");
  return deg;
}

// High dimensions: count preimages of a small regular value with Jacobian
// signs.  Honest but heuristic; the resolution-doubling check below guards it.
int degree_nd(const VectorMap& map, const EmbeddedSphere& S, int resolution, std::uint64_t seed) {
  const int n = S.dim;
  Rng rng(seed);

  const std::vector<Vec> probes = sample_boundary(S, 64, seed ^ 0xabcdef);
  double scale = 0.0;
  for (const auto& p : probes) scale = std::max(scale, map(p).norm());
  if (scale == 0.0) throw UnreliableResultError("map vanishes identically on probes");
  const Vec target = (1e-3 * scale) * rng.direction(n);

  auto jacobian = [&](const Vec& y) {
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(y[j]));
      Vec yp = y, ym = y;
      yp[j] += h;
      ym[j] -= h;
      J.col(j) = (map(yp) - map(ym)) / (2.0 * h);
    }
    return J;
  };

  const int starts = std::max(resolution, 16);
  std::vector<Vec> seeds_pts = sample_interior(S, starts, seed ^ 0x5555);
  std::vector<Vec> roots;
  std::vector<int> signs;
  std::mutex roots_mutex;

  parallel_for(starts, [&](int si) {
    Vec y = seeds_pts[si];
    for (int it = 0; it < 60; ++it) {
      Vec F = map(y) - target;
      if (F.norm() < 1e-10 * std::max(1.0, scale)) break;
      Mat J = jacobian(y);
      Vec step = J.fullPivLu().solve(-F);
      if (!step.allFinite()) return;
      const double cap = 0.2 * S.bounding_radius;
      if (step.norm() > cap) step *= cap / step.norm();
      y += step;
      if ((y - S.center_hint).norm() > 4.0 * S.bounding_radius) return;
    }
    if ((map(y) - target).norm() >= 1e-10 * std::max(1.0, scale)) return;
    if (!(S.f(y) < -1e-9)) return;  // only interior roots count
    const double det = jacobian(y).determinant();
    if (det == 0.0) return;
    std::lock_guard<std::mutex> lock(roots_mutex);
    for (const auto& r : roots)
      if ((r - y).norm() < 1e-6 * std::max(1.0, S.bounding_radius)) return;
    roots.push_back(y);
    signs.push_back(det > 0 ? 1 : -1);
  });

  int deg = 0;
  for (int s : signs) deg += s;
  return deg;
}

int degree_once(const VectorMap& map, const EmbeddedSphere& S, int resolution, std::uint64_t seed) {
  switch (S.dim) {
    case 1:
      return degree_1d(map, S);
    case 2:
      return degree_2d(map, S, resolution);
    case 3:
      return degree_3d(map, S, resolution);
    default:
      return degree_nd(map, S, resolution, seed);
  }
}

}  // namespace

int brouwer_degree(const VectorMap& map, const EmbeddedSphere& S, int resolution,
                   std::uint64_t seed) {
  const int d1 = degree_once(map, S, resolution, seed);
  if (S.dim == 1) return d1;  // endpoint signs, nothing to refine
  const int d2 = degree_once(map, S, 2 * resolution, seed ^ 0x9e3779b9);
  if (d1 != d2)
    throw UnreliableResultError("degree did not stabilise under resolution doubling");
  return d1;
}

}  // namespace pblab
