#include "emdec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "emdec/error.hpp"

namespace emdec {

namespace {

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// One sub-cell of a top cell, in the top cell's local numbering.
struct LocalCell {
  int dim = 0;
  std::vector<Index> verts;  // sorted global vertex indices
  int orientation = 1;       // relative to the sorted standard orientation
  Point center{};
  double measure = 1.0;
  std::vector<std::pair<int, int>> faces;  // (local face, standard sign)
};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Solves the (k x k) Gram system by Gaussian elimination with partial pivoting.
// Returns false when the system is singular.
bool solve_small(std::array<std::array<double, 3>, 3> a, std::array<double, 3>& b, int k) {
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = c + 1; r < k; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int j = c; j < k; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (int c = k - 1; c >= 0; --c) {
    double s = b[c];
    for (int j = c + 1; j < k; ++j) s -= a[c][j] * b[j];
    b[c] = s / a[c][c];
  }
  return true;
}

// Circumcenter and unsigned volume of a simplex given by its points.
void simplex_geometry(const std::vector<Point>& pts, Point& center, double& volume) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k == 0) {
    center = pts[0];
    volume = 1.0;
    return;
  }
  std::array<Point, 3> d{};
  for (int i = 0; i < k; ++i) d[i] = sub(pts[i + 1], pts[0]);
  std::array<std::array<double, 3>, 3> gram{};
  std::array<double, 3> rhs{};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram[i][j] = dot(d[i], d[j]);
    rhs[i] = 0.5 * gram[i][i];
  }
  // det of the Gram matrix gives the squared volume (times k!^2)
  double det = 0.0;
  if (k == 1) {
    det = gram[0][0];
  } else if (k == 2) {
    det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
  } else {
    det = gram[0][0] * (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1]) -
          gram[0][1] * (gram[1][0] * gram[2][2] - gram[1][2] * gram[2][0]) +
          gram[0][2] * (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0]);
  }
  volume = std::sqrt(std::max(det, 0.0)) / factorial(k);
  center = pts[0];
  if (!solve_small(gram, rhs, k)) return;
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < 3; ++c) center[c] += rhs[i] * d[i][c];
}

double orientation_det(const std::vector<Point>& pts, int n) {
  const Point a = sub(pts[1], pts[0]);
  const Point b = sub(pts[2], pts[0]);
  if (n == 2) return a[0] * b[1] - a[1] * b[0];
  const Point c = sub(pts[3], pts[0]);
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

std::vector<LocalCell> local_simplex_cells(int n, std::vector<Index> top,
                                           const std::vector<Point>& vertices) {
  std::sort(top.begin(), top.end());
  const int m = n + 1;
  std::vector<LocalCell> cells(std::size_t{1} << m);
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    LocalCell& c = cells[mask];
    std::vector<Point> pts;
    for (int i = 0; i < m; ++i) {
      if (!(mask & (1u << i))) continue;
      c.verts.push_back(top[i]);
      pts.push_back(vertices[top[i]]);
    }
    c.dim = static_cast<int>(c.verts.size()) - 1;
    if (c.dim > 0) {
      // standard boundary: removing the p-th vertex carries sign (-1)^p
      int pos = 0;
      for (int i = 0; i < m; ++i) {
        if (!(mask & (1u << i))) continue;
        c.faces.emplace_back(static_cast<int>(mask & ~(1u << i)), (pos % 2 == 0) ? 1 : -1);
        ++pos;
      }
    }
    simplex_geometry(pts, c.center, c.measure);
    if (c.dim == n) {
      const double det = orientation_det(pts, n);
      c.orientation = det >= 0.0 ? 1 : -1;
    }
  }
  cells.erase(cells.begin());  // mask 0 is empty
  for (auto& c : cells)
    for (auto& f : c.faces) f.first -= 1;
  return cells;
}

std::vector<LocalCell> local_box_cells(int n, const std::vector<Index>& top,
                                       const std::vector<Point>& vertices) {
  Point lo{}, hi{};
  for (int a = 0; a < n; ++a) {
    lo[a] = hi[a] = vertices[top[0]][a];
    for (Index v : top) {
      lo[a] = std::min(lo[a], vertices[v][a]);
      hi[a] = std::max(hi[a], vertices[v][a]);
    }
    if (!(hi[a] > lo[a])) throw Error(ErrorKind::InvalidMesh, "degenerate box cell");
  }
  const int corners = 1 << n;
  std::vector<Index> corner(corners, -1);
  for (Index v : top) {
    int bits = 0;
    for (int a = 0; a < n; ++a) {
      const double x = vertices[v][a];
      if (x == hi[a])
        bits |= 1 << a;
      else if (x != lo[a])
        throw Error(ErrorKind::InvalidMesh, "box cell is not axis-aligned");
    }
    if (corner[bits] != -1) throw Error(ErrorKind::InvalidMesh, "box cell repeats a corner");
    corner[bits] = v;
  }

  // Codes per axis: 0 = lower, 1 = upper, 2 = spanned.
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  auto decode = [n](int code) {
    std::array<int, 3> c{};
    for (int a = 0; a < n; ++a) {
      c[a] = code % 3;
      code /= 3;
    }
    return c;
  };
  auto encode = [n](const std::array<int, 3>& c) {
    int code = 0;
    for (int a = n - 1; a >= 0; --a) code = code * 3 + c[a];
    return code;
  };

  std::vector<LocalCell> cells(total);
  for (int code = 0; code < total; ++code) {
    const auto c = decode(code);
    LocalCell& cell = cells[code];
    std::vector<int> spanned;
    for (int a = 0; a < n; ++a)
      if (c[a] == 2) spanned.push_back(a);
    cell.dim = static_cast<int>(spanned.size());
    for (int bits = 0; bits < corners; ++bits) {
      bool match = true;
      for (int a = 0; a < n; ++a)
        if (c[a] != 2 && ((bits >> a) & 1) != c[a]) match = false;
      if (match) cell.verts.push_back(corner[bits]);
    }
    std::sort(cell.verts.begin(), cell.verts.end());
    cell.measure = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (a >= n) {
        cell.center[a] = 0.0;
      } else if (c[a] == 2) {
        cell.center[a] = 0.5 * (lo[a] + hi[a]);
        cell.measure *= hi[a] - lo[a];
      } else {
        cell.center[a] = c[a] ? hi[a] : lo[a];
      }
    }
    // faces oriented by their normal axis in 3D: the y-normal face is z^x
    cell.orientation = (n == 3 && cell.dim == 2 && spanned[0] == 0 && spanned[1] == 2) ? -1 : 1;
    for (std::size_t i = 0; i < spanned.size(); ++i) {
      const int sgn = (i % 2 == 0) ? 1 : -1;
      auto up = c;
      up[spanned[i]] = 1;
      auto down = c;
      down[spanned[i]] = 0;
      cell.faces.emplace_back(encode(up), sgn);
      cell.faces.emplace_back(encode(down), -sgn);
    }
  }
  return cells;
}

double signed_height(const LocalCell& low, const LocalCell& high, const std::vector<Point>& vertices) {
  const Point u = sub(high.center, low.center);
  const double len = std::sqrt(dot(u, u));
  if (len == 0.0) return 0.0;
  Index apex = -1;
  for (Index v : high.verts)
    if (!std::binary_search(low.verts.begin(), low.verts.end(), v)) {
      apex = v;
      break;
    }
  const double s = dot(u, sub(vertices[apex], low.center));
  return s >= 0.0 ? len : -len;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Index> MeshComplex::find_cell(int k, std::span<const Index> sorted_vertices) const {
  const auto& list = data_.cells[k];
  auto equal = [&](const std::vector<Index>& c) {
    return std::equal(c.begin(), c.end(), sorted_vertices.begin(), sorted_vertices.end());
  };
  if (k == data_.dimension) {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (equal(list[i])) return static_cast<Index>(i);
    return std::nullopt;
  }
  auto it = std::lower_bound(list.begin(), list.end(), sorted_vertices,
                             [](const std::vector<Index>& c, std::span<const Index> key) {
                               return std::lexicographical_compare(c.begin(), c.end(), key.begin(),
                                                                   key.end());
                             });
  if (it != list.end() && equal(*it)) return static_cast<Index>(it - list.begin());
  return std::nullopt;
}

double MeshComplex::total_volume() const {
  const auto m = primal_measure(dimension());
  return std::accumulate(m.begin(), m.end(), 0.0);
}

MeshComplex assemble_complex(int n, std::vector<Point> vertices,
                             const std::vector<std::vector<Index>>& top_cells) {
  if (n != 2 && n != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  if (top_cells.empty()) throw Error(ErrorKind::InvalidMesh, "mesh has no cells");
  const std::size_t simplex_size = static_cast<std::size_t>(n) + 1;
  const std::size_t box_size = std::size_t{1} << n;
  const std::size_t size = top_cells.front().size();
  if (size != simplex_size && size != box_size)
    throw Error(ErrorKind::InvalidMesh, "cell tuple length matches neither a simplex nor a box");
  const CellKind kind = size == simplex_size ? CellKind::Simplex : CellKind::Box;

  for (auto& p : vertices)
    for (int a = n; a < 3; ++a) p[a] = 0.0;

  // Local complexes of every top cell.
  std::vector<std::vector<LocalCell>> locals;
  locals.reserve(top_cells.size());
  double max_edge = 0.0;
  for (std::size_t t = 0; t < top_cells.size(); ++t) {
    const auto& tc = top_cells[t];
    if (tc.size() != size) throw Error(ErrorKind::InvalidMesh, "mixed cell types at cell " + std::to_string(t));
    for (Index v : tc)
      if (v < 0 || v >= static_cast<Index>(vertices.size()))
        throw Error(ErrorKind::InvalidMesh, "cell " + std::to_string(t) + " references vertex " + std::to_string(v));
    auto sorted = tc;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorKind::InvalidMesh, "cell " + std::to_string(t) + " repeats a vertex");
    locals.push_back(kind == CellKind::Simplex ? local_simplex_cells(n, tc, vertices)
                                               : local_box_cells(n, tc, vertices));
    for (const auto& c : locals.back())
      if (c.dim == 1) max_edge = std::max(max_edge, c.measure);
  }
  for (std::size_t t = 0; t < locals.size(); ++t) {
    for (const auto& c : locals[t])
      if (c.dim == n && !(c.measure > 1e-12 * std::pow(max_edge, n)))
        throw Error(ErrorKind::InvalidMesh, "degenerate cell " + std::to_string(t));
  }

  MeshData d;
  d.dimension = n;
  d.kind = kind;
  d.vertices = std::move(vertices);

  // Global numbering: lower cells lexicographic, top cells in input order.
  std::array<std::map<std::vector<Index>, Index>, kMaxDim + 1> lookup;
  for (const auto& loc : locals)
    for (const auto& c : loc)
      if (c.dim < n) lookup[c.dim].emplace(c.verts, 0);
  for (int k = 0; k < n; ++k) {
    Index next = 0;
    for (auto& [verts, idx] : lookup[k]) {
      idx = next++;
      d.cells[k].push_back(verts);
    }
  }
  for (std::size_t t = 0; t < locals.size(); ++t) {
    for (const auto& c : locals[t])
      if (c.dim == n) {
        if (!lookup[n].emplace(c.verts, static_cast<Index>(t)).second)
          throw Error(ErrorKind::InvalidMesh, "duplicate top cell " + std::to_string(t));
        d.cells[n].push_back(c.verts);
      }
  }
  // Every vertex must be used; isolated vertices would leave empty rows.
  if (d.cells[0].size() != d.vertices.size())
    throw Error(ErrorKind::InvalidMesh, "mesh has unreferenced vertices");

  for (int k = 0; k <= n; ++k) {
    const std::size_t count = d.cells[k].size();
    d.primal_measure[k].assign(count, 0.0);
    d.dual_measure[k].assign(count, 0.0);
    d.on_boundary[k].assign(count, 0);
    d.circumcenter[k].assign(count, Point{});
  }

  // Boundary rows, geometry, dual measures.
  std::array<std::vector<std::vector<std::pair<Index, std::int8_t>>>, kMaxDim + 1> rows;
  std::array<std::vector<std::uint8_t>, kMaxDim + 1> seen;
  for (int k = 0; k <= n; ++k) {
    rows[k].resize(d.cells[k].size());
    seen[k].assign(d.cells[k].size(), 0);
  }
  std::map<std::pair<Index, Index>, double> share_raw;  // (face, edge) -> dual contribution

  for (const auto& loc : locals) {
    std::vector<Index> global(loc.size());
    for (std::size_t i = 0; i < loc.size(); ++i) global[i] = lookup[loc[i].dim].at(loc[i].verts);

    for (std::size_t i = 0; i < loc.size(); ++i) {
      const LocalCell& c = loc[i];
      const Index g = global[i];
      if (seen[c.dim][g]) continue;
      seen[c.dim][g] = 1;
      d.primal_measure[c.dim][g] = c.measure;
      d.circumcenter[c.dim][g] = c.center;
      for (auto [f, s] : c.faces) {
        const int sign = s * c.orientation * loc[f].orientation;
        rows[c.dim][g].emplace_back(global[f], static_cast<std::int8_t>(sign));
      }
      std::sort(rows[c.dim][g].begin(), rows[c.dim][g].end());
    }

    // Elementary dual volumes inside this top cell, from the top down.
    std::vector<std::vector<int>> local_cofaces(loc.size());
    for (std::size_t i = 0; i < loc.size(); ++i)
      for (auto [f, s] : loc[i].faces) local_cofaces[f].push_back(static_cast<int>(i));
    std::vector<double> vol(loc.size(), 0.0);
    for (int k = n; k >= 0; --k) {
      for (std::size_t i = 0; i < loc.size(); ++i) {
        if (loc[i].dim != k) continue;
        if (k == n) {
          vol[i] = 1.0;
        } else {
          double sum = 0.0;
          for (int up : local_cofaces[i]) {
            const double h = signed_height(loc[i], loc[up], d.vertices);
            sum += h * vol[up];
            if (k == 1) share_raw[{global[up], global[i]}] += h * vol[up] / (n - 1);
          }
          vol[i] = sum / (n - k);
        }
        d.dual_measure[k][global[i]] += vol[i];
      }
    }
  }

  for (int k = 1; k <= n; ++k) {
    Incidence& inc = d.boundary[k];
    for (const auto& r : rows[k]) {
      for (auto [t, s] : r) {
        inc.targets.push_back(t);
        inc.signs.push_back(s);
      }
      inc.offsets.push_back(inc.nnz());
    }
  }
  for (int k = 0; k < n; ++k) {
    const Incidence& b = d.boundary[k + 1];
    Incidence& co = d.cofaces[k];
    std::vector<Index> count(d.cells[k].size() + 1, 0);
    for (Index t : b.targets) ++count[t + 1];
    for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    co.offsets = count;
    co.targets.assign(b.nnz(), 0);
    co.signs.assign(b.nnz(), 0);
    std::vector<Index> fill(count.begin(), count.end() - 1);
    for (Index r = 0; r < b.rows(); ++r) {
      const auto ts = b.row_targets(r);
      const auto ss = b.row_signs(r);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const Index pos = fill[ts[j]]++;
        co.targets[pos] = r;
        co.signs[pos] = ss[j];
      }
    }
  }
  d.cofaces[n].offsets.assign(d.cells[n].size() + 1, 0);

  // Boundary flags: (n-1)-cells with one coface, then everything below them.
  for (Index f = 0; f < static_cast<Index>(d.cells[n - 1].size()); ++f) {
    const auto& co = d.cofaces[n - 1];
    if (co.offsets[f + 1] - co.offsets[f] == 1) d.on_boundary[n - 1][f] = 1;
  }
  for (int k = n - 1; k >= 1; --k) {
    for (Index c = 0; c < static_cast<Index>(d.cells[k].size()); ++c) {
      if (!d.on_boundary[k][c]) continue;
      for (Index t : d.boundary[k].row_targets(c)) d.on_boundary[k - 1][t] = 1;
    }
  }

  if (n >= 2) {
    const Incidence& co = d.cofaces[1];
    d.edge_face_share.assign(co.nnz(), 0.0);
    for (Index e = 0; e < co.rows(); ++e) {
      for (Index j = co.offsets[e]; j < co.offsets[e + 1]; ++j) {
        auto it = share_raw.find({co.targets[j], e});
        const double raw = it == share_raw.end() ? 0.0 : it->second;
        d.edge_face_share[j] = raw / d.dual_measure[1][e];
      }
    }
  }
  return MeshComplex(std::move(d));
}

MeshComplex build_rect_grid(std::span<const Index> counts, std::span<const double> spacings) {
  const int n = static_cast<int>(counts.size());
  if (n != 2 && n != 3) throw Error(ErrorKind::InvalidArgument, "rect grid dimension must be 2 or 3");
  if (spacings.size() != counts.size())
    throw Error(ErrorKind::InvalidArgument, "counts and spacings differ in length");
  for (int a = 0; a < n; ++a) {
    if (counts[a] < 1) throw Error(ErrorKind::InvalidArgument, "cell count must be >= 1");
    if (!(spacings[a] > 0.0) || !std::isfinite(spacings[a]))
      throw Error(ErrorKind::InvalidArgument, "spacing must be positive");
  }
  const Index nx = counts[0] + 1;
  const Index ny = counts[1] + 1;
  const Index nz = n == 3 ? counts[2] + 1 : 1;
  auto vid = [&](Index i, Index j, Index k) { return i + nx * (j + ny * k); };

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i < nx; ++i)
        vertices.push_back({i * spacings[0], j * spacings[1], n == 3 ? k * spacings[2] : 0.0});

  std::vector<std::vector<Index>> boxes;
  for (Index k = 0; k < (n == 3 ? counts[2] : 1); ++k)
    for (Index j = 0; j < counts[1]; ++j)
      for (Index i = 0; i < counts[0]; ++i) {
        std::vector<Index> box{vid(i, j, k), vid(i + 1, j, k), vid(i, j + 1, k), vid(i + 1, j + 1, k)};
        if (n == 3) {
          box.insert(box.end(), {vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i, j + 1, k + 1),
                                 vid(i + 1, j + 1, k + 1)});
        }
        boxes.push_back(std::move(box));
      }
  return assemble_complex(n, std::move(vertices), boxes);
}

MeshComplex build_simplicial(int dimension, std::vector<Point> vertices,
                             const std::vector<std::vector<Index>>& top_cells) {
  if (!top_cells.empty() && top_cells.front().size() != static_cast<std::size_t>(dimension) + 1)
    throw Error(ErrorKind::InvalidMesh, "top cells must be simplices");
  MeshComplex mesh = assemble_complex(dimension, std::move(vertices), top_cells);
  const ValidationReport report = validate(mesh);
  for (const auto& issue : report.issues) {
    if (issue.check == "dual-measure") {
      throw Error(ErrorKind::NotWellCentered,
                  "dual measure of " + std::to_string(issue.degree) + "-cell " +
                      std::to_string(issue.cell) + " is not positive (" + issue.detail + ")");
    }
  }
  if (!report.ok()) throw Error(ErrorKind::InvalidMesh, report.to_string());
  return mesh;
}

MeshComplex generate_jittered_triangulation(std::array<Index, 2> counts, std::array<double, 2> spacings,
                                            double jitter_fraction, std::uint64_t seed) {
  if (counts[0] < 1 || counts[1] < 1) throw Error(ErrorKind::InvalidArgument, "cell count must be >= 1");
  if (!(spacings[0] > 0.0) || !(spacings[1] > 0.0))
    throw Error(ErrorKind::InvalidArgument, "spacing must be positive");
  if (!(jitter_fraction >= 0.0 && jitter_fraction < 0.5))
    throw Error(ErrorKind::InvalidArgument, "jitter_fraction must lie in [0, 0.5)");

  const Index nx = counts[0];
  const Index ny = counts[1];
  const double hx = spacings[0];
  const double hy = spacings[1];
  const double width = nx * hx;

  // Base lattice: even rows at i*hx, odd rows at 0, (i+1/2)*hx, width.
  std::vector<Point> base;
  std::vector<std::vector<Index>> rows(ny + 1);
  for (Index j = 0; j <= ny; ++j) {
    const double y = j * hy;
    auto add = [&](double x) {
      rows[j].push_back(static_cast<Index>(base.size()));
      base.push_back({x, y, 0.0});
    };
    if (j % 2 == 0) {
      for (Index i = 0; i <= nx; ++i) add(i * hx);
    } else {
      add(0.0);
      for (Index i = 0; i < nx; ++i) add((i + 0.5) * hx);
      add(width);
    }
  }
  std::vector<std::vector<Index>> triangles;
  for (Index j = 0; j < ny; ++j) {
    const auto& lower = rows[j];
    const auto& upper = rows[j + 1];
    std::size_t a = 0, b = 0;
    while (a + 1 < lower.size() || b + 1 < upper.size()) {
      // on the shared end point, advance whichever row lags behind
      bool advance_lower = b + 1 == upper.size();
      if (!advance_lower && a + 1 < lower.size()) {
        const double xl = base[lower[a + 1]][0], xu = base[upper[b + 1]][0];
        advance_lower = xl < xu || (xl == xu && base[lower[a]][0] < base[upper[b]][0]);
      }
      if (advance_lower) {
        triangles.push_back({lower[a], lower[a + 1], upper[b]});
        ++a;
      } else {
        triangles.push_back({lower[a], upper[b + 1], upper[b]});
        ++b;
      }
    }
  }

  // retries keep drawing from one stream so nearby seeds never coincide
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::string last_failure;
  for (int attempt = 0; attempt <= kJitterRetries; ++attempt) {
    std::vector<Point> pts = base;
    if (jitter_fraction > 0.0) {
      for (Index j = 1; j < ny; ++j) {
        for (std::size_t i = 1; i + 1 < rows[j].size(); ++i) {
          Point& p = pts[rows[j][i]];
          p[0] += jitter_fraction * hx * unit(rng);
          p[1] += jitter_fraction * hy * unit(rng);
        }
      }
    }
    try {
      MeshComplex mesh = assemble_complex(2, std::move(pts), triangles);
      const ValidationReport report = validate(mesh);
      if (report.ok()) return mesh;
      last_failure = report.to_string();
    } catch (const Error& e) {
      last_failure = e.what();
    }
    if (jitter_fraction == 0.0) break;
  }
  throw Error(ErrorKind::GenerationFailed, "no valid triangulation after retries: " + last_failure);
}

// ---------------------------------------------------------------------------

bool ValidationReport::has(std::string_view check) const {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.check == check; });
}

std::string ValidationReport::to_string() const {
  if (issues.empty()) return "mesh is valid\n";
  std::ostringstream os;
  for (const auto& i : issues)
    os << i.check << ": " << i.degree << "-cell " << i.cell << (i.detail.empty() ? "" : " (" + i.detail + ")")
       << '\n';
  return os.str();
}

ValidationReport validate(const MeshComplex& mesh) {
  ValidationReport report;
  const int n = mesh.dimension();
  auto issue = [&](std::string check, int k, Index c, std::string detail) {
    report.issues.push_back({std::move(check), k, c, std::move(detail)});
  };
  if (n != 2 && n != 3) {
    issue("dimension", n, 0, "dimension must be 2 or 3");
    return report;
  }
  for (int k = 0; k <= n; ++k) {
    const auto cnt = static_cast<std::size_t>(mesh.num_cells(k));
    if (mesh.primal_measure(k).size() != cnt || mesh.dual_measure(k).size() != cnt ||
        mesh.boundary_flags(k).size() != cnt) {
      issue("array-size", k, 0, "measure or flag array length differs from cell count");
      return report;
    }
    if (k >= 1 && mesh.boundary(k).rows() != mesh.num_cells(k)) {
      issue("array-size", k, 0, "incidence row count differs from cell count");
      return report;
    }
  }

  for (int k = 1; k <= n; ++k) {
    const auto& inc = mesh.boundary(k);
    for (std::int8_t s : inc.signs)
      if (s != 1 && s != -1) {
        issue("incidence-sign", k, 0, "sign outside {-1,+1}");
        break;
      }
  }

  // boundary of boundary
  for (int k = 2; k <= n; ++k) {
    const auto& outer = mesh.boundary(k);
    const auto& inner = mesh.boundary(k - 1);
    for (Index c = 0; c < outer.rows(); ++c) {
      std::map<Index, int> acc;
      const auto ts = outer.row_targets(c);
      const auto ss = outer.row_signs(c);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto t2 = inner.row_targets(ts[i]);
        const auto s2 = inner.row_signs(ts[i]);
        for (std::size_t j = 0; j < t2.size(); ++j) acc[t2[j]] += ss[i] * s2[j];
      }
      for (auto [t, v] : acc)
        if (v != 0) {
          issue("boundary-of-boundary", k, c, "nonzero coefficient on " + std::to_string(k - 2) + "-cell " +
                                                  std::to_string(t));
          break;
        }
    }
  }

  double mean_edge = 0.0;
  for (double l : mesh.primal_measure(1)) mean_edge += l;
  mean_edge /= std::max<Index>(mesh.num_edges(), 1);

  for (int k = 0; k <= n; ++k) {
    const auto pm = mesh.primal_measure(k);
    const auto dm = mesh.dual_measure(k);
    const double dual_floor = 1e-10 * std::pow(mean_edge, n - k);
    for (Index c = 0; c < mesh.num_cells(k); ++c) {
      if (k >= 1 && !(pm[c] > 0.0)) issue("primal-measure", k, c, "measure " + std::to_string(pm[c]));
      if (!(dm[c] > dual_floor)) {
        std::ostringstream os;
        os.precision(6);
        os << "dual measure " << dm[c];
        issue("dual-measure", k, c, os.str());
      }
    }
  }

  const auto& co = mesh.cofaces(n - 1);
  for (Index f = 0; f < mesh.num_cells(n - 1); ++f) {
    const Index count = co.offsets[f + 1] - co.offsets[f];
    if (count != 1 && count != 2) {
      issue("coface-count", n - 1, f, std::to_string(count) + " cofaces");
      continue;
    }
    if (mesh.on_boundary(n - 1, f) != (count == 1)) issue("boundary-flag", n - 1, f, "flag disagrees with coface count");
    if (count == 2 && co.signs[co.offsets[f]] == co.signs[co.offsets[f] + 1])
      issue("orientation", n - 1, f, "cofaces induce the same orientation");
  }
  return report;
}

}  // namespace emdec
