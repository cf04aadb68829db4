#pragma once

// Mesh and cochain fixtures shared by the unit tests and the acceptance
// runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "emdec/dec.hpp"
#include "emdec/mesh.hpp"
#include "oracles/yee.hpp"

namespace fixtures {

using emdec::Index;
using emdec::MeshComplex;
using emdec::Point;

inline MeshComplex rect2(Index nx, Index ny, double hx, double hy) {
  const Index c[2] = {nx, ny};
  const double h[2] = {hx, hy};
  return emdec::build_rect_grid(c, h);
}

inline MeshComplex rect3(Index nx, Index ny, Index nz, double hx, double hy, double hz) {
  const Index c[3] = {nx, ny, nz};
  const double h[3] = {hx, hy, hz};
  return emdec::build_rect_grid(c, h);
}

/// Rect grid in 2D or 3D with at most ~max_cells top cells and random spacings.
inline MeshComplex random_rect(std::mt19937_64& rng, int max_cells = 500) {
  std::uniform_int_distribution<int> dim(2, 3);
  std::uniform_real_distribution<double> h(0.05, 2.0);
  const int n = dim(rng);
  std::uniform_int_distribution<Index> count(1, n == 2 ? 20 : 7);
  while (true) {
    std::vector<Index> c(n);
    std::vector<double> s(n);
    long cells = 1;
    for (int a = 0; a < n; ++a) {
      c[a] = count(rng);
      s[a] = h(rng);
      cells *= c[a];
    }
    if (cells <= max_cells) return emdec::build_rect_grid(c, s);
  }
}

inline MeshComplex random_jittered(std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> count(2, 12);
  std::uniform_real_distribution<double> h(0.1, 2.0), aspect(0.8, 1.25), jitter(0.0, 0.15);
  std::uniform_int_distribution<std::uint64_t> seed(0, 1u << 30);
  const double hx = h(rng);
  const double hy = hx * aspect(rng);  // the shifted-row lattice is acute only near unit aspect
  return emdec::generate_jittered_triangulation({count(rng), count(rng)}, {hx, hy}, jitter(rng), seed(rng));
}

/// Kuhn subdivision (6 tetrahedra per box) of an n^3 grid with interior
/// vertices jittered. Assembled without the well-centredness check.
inline MeshComplex kuhn_tetrahedra(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  const double h = 1.0 / n;
  auto vid = [&](Index i, Index j, Index k) { return i + (n + 1) * (j + (n + 1) * k); };
  std::vector<Point> v;
  for (Index k = 0; k <= n; ++k)
    for (Index j = 0; j <= n; ++j)
      for (Index i = 0; i <= n; ++i) {
        Point p{i * h, j * h, k * h};
        const bool interior = i > 0 && i < n && j > 0 && j < n && k > 0 && k < n;
        if (interior)
          for (double& x : p) x += jitter(rng) * h;
        v.push_back(p);
      }
  std::vector<std::vector<Index>> tets;
  std::array<int, 3> perm{0, 1, 2};
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        std::sort(perm.begin(), perm.end());
        do {
          std::array<Index, 3> at{i, j, k};
          std::vector<Index> t{vid(at[0], at[1], at[2])};
          for (int a : perm) {
            ++at[a];
            t.push_back(vid(at[0], at[1], at[2]));
          }
          tets.push_back(t);
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
  return emdec::assemble_complex(3, std::move(v), tets);
}

/// Any of the mesh families above, at most ~500 top cells.
inline MeshComplex random_mesh(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return random_rect(rng);
    case 1: return random_jittered(rng);
    default: return kuhn_tetrahedra(rng, std::uniform_int_distribution<Index>(1, 4)(rng));
  }
}

inline emdec::Cochain random_cochain(const MeshComplex& mesh, int degree, emdec::Side side,
                                     std::mt19937_64& rng) {
  emdec::Cochain c(mesh, degree, side);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& x : c.values()) x = u(rng);
  return c;
}

/// Axis along which a rect-grid edge runs, and its lower grid indices.
struct GridCell {
  int axis;
  std::array<int, 3> index;
};

inline GridCell grid_edge(const MeshComplex& mesh, Index e, const std::array<double, 3>& h) {
  const auto& c = mesh.cell(1, e);
  const Point& a = mesh.vertices()[c[0]];
  const Point& b = mesh.vertices()[c[1]];
  GridCell g{0, {0, 0, 0}};
  for (int d = 0; d < 3; ++d) {
    if (std::abs(a[d] - b[d]) > 0.5 * h[d]) g.axis = d;
    g.index[d] = static_cast<int>(std::lround(std::min(a[d], b[d]) / h[d]));
  }
  return g;
}

/// Normal axis of a rect-grid face (its constant coordinate) and lower indices.
inline GridCell grid_face(const MeshComplex& mesh, Index f, const std::array<double, 3>& h, int dimension) {
  const auto& c = mesh.cell(2, f);
  GridCell g{2, {0, 0, 0}};
  for (int d = 0; d < 3; ++d) {
    double lo = INFINITY, hi = -INFINITY;
    for (Index v : c) {
      lo = std::min(lo, mesh.vertices()[v][d]);
      hi = std::max(hi, mesh.vertices()[v][d]);
    }
    if (dimension == 3 && hi - lo < 0.5 * h[d]) g.axis = d;
    g.index[d] = static_cast<int>(std::lround(lo / h[d]));
  }
  return g;
}

/// Links each cochain entry on a rect grid to a Yee point value:
/// cochain = scale * point value, scale being the signed length or area.
struct YeeLink {
  double* value;
  double scale;
};

struct YeeMap {
  std::vector<YeeLink> edges, faces;

  void load(std::span<const double> E, std::span<const double> B) const {
    for (std::size_t i = 0; i < edges.size(); ++i) *edges[i].value = E[i] / edges[i].scale;
    for (std::size_t i = 0; i < faces.size(); ++i) *faces[i].value = B[i] / faces[i].scale;
  }
  std::vector<double> edge_values() const {
    std::vector<double> out;
    for (const auto& l : edges) out.push_back(*l.value * l.scale);
    return out;
  }
  std::vector<double> face_values() const {
    std::vector<double> out;
    for (const auto& l : faces) out.push_back(*l.value * l.scale);
    return out;
  }
};

namespace detail {

inline double edge_direction(const MeshComplex& mesh, Index e, int axis) {
  const auto& c = mesh.cell(1, e);
  return mesh.vertices()[c[1]][axis] > mesh.vertices()[c[0]][axis] ? 1.0 : -1.0;
}

/// +1 when the face circulates (a+1) then (a+2) about its normal axis a.
inline double face_orientation(const MeshComplex& mesh, Index f, const std::array<double, 3>& h, int axis) {
  const int u = (axis + 1) % 3, w = (axis + 2) % 3;
  const auto& inc = mesh.boundary(2);
  double low_w = INFINITY;
  double sign = 0.0;
  for (Index j = inc.offsets[f]; j < inc.offsets[f + 1]; ++j) {
    const Index e = inc.targets[j];
    const GridCell g = grid_edge(mesh, e, h);
    if (g.axis != u) continue;
    const double coord = mesh.vertices()[mesh.cell(1, e)[0]][w];
    if (coord < low_w) {
      low_w = coord;
      sign = inc.signs[j] * edge_direction(mesh, e, u);
    }
  }
  return sign;
}

}  // namespace detail

inline YeeMap yee_map(const MeshComplex& mesh, oracle::Yee3D& y) {
  const std::array<double, 3> h{y.hx, y.hy, y.hz};
  YeeMap m;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const GridCell g = grid_edge(mesh, e, h);
    const auto [i, j, k] = g.index;
    double* v = g.axis == 0 ? &y.Ex(i, j, k) : g.axis == 1 ? &y.Ey(i, j, k) : &y.Ez(i, j, k);
    m.edges.push_back({v, h[g.axis] * detail::edge_direction(mesh, e, g.axis)});
  }
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const GridCell g = grid_face(mesh, f, h, 3);
    const auto [i, j, k] = g.index;
    double* v = g.axis == 0 ? &y.Bx(i, j, k) : g.axis == 1 ? &y.By(i, j, k) : &y.Bz(i, j, k);
    const double area = h[(g.axis + 1) % 3] * h[(g.axis + 2) % 3];
    m.faces.push_back({v, area * detail::face_orientation(mesh, f, h, g.axis)});
  }
  return m;
}

inline YeeMap yee_map(const MeshComplex& mesh, oracle::Yee2D& y) {
  const std::array<double, 3> h{y.hx, y.hy, 1.0};
  YeeMap m;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const GridCell g = grid_edge(mesh, e, h);
    double* v = g.axis == 0 ? &y.Ex(g.index[0], g.index[1]) : &y.Ey(g.index[0], g.index[1]);
    m.edges.push_back({v, h[g.axis] * detail::edge_direction(mesh, e, g.axis)});
  }
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const GridCell g = grid_face(mesh, f, h, 2);
    m.faces.push_back({&y.Bz(g.index[0], g.index[1]), y.hx * y.hy * detail::face_orientation(mesh, f, h, 2)});
  }
  return m;
}

}  // namespace fixtures
