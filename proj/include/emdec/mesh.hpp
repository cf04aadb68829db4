#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emdec {

using Index = std::int32_t;
using Point = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

/// Signed sparse map in CSR layout. Row i lists targets[offsets[i]..offsets[i+1])
/// with matching orientation signs.
struct Incidence {
  std::vector<Index> offsets{0};
  std::vector<Index> targets;
  std::vector<std::int8_t> signs;

  Index rows() const { return static_cast<Index>(offsets.size()) - 1; }
  Index nnz() const { return static_cast<Index>(targets.size()); }
  std::span<const Index> row_targets(Index i) const {
    return {targets.data() + offsets[i], targets.data() + offsets[i + 1]};
  }
  std::span<const std::int8_t> row_signs(Index i) const {
    return {signs.data() + offsets[i], signs.data() + offsets[i + 1]};
  }
};

enum class CellKind { Simplex, Box };

/// Raw contents of a primal complex and its circumcentric dual measures.
///
/// cells[k] holds sorted vertex tuples. Top cells keep input order; lower
/// cells are numbered in lexicographic order of their tuples. Orientation
/// lives only in the incidence signs:
///   boundary[k]  maps k-cells to their (k-1)-faces (k = 1..dimension)
///   cofaces[k]   maps k-cells to their (k+1)-cofaces, the transpose of
///                boundary[k+1], rows sorted by coface index.
/// edge_face_share is aligned with cofaces[1] entries and holds the fraction
/// of the edge's dual measure lying inside each coface.
struct MeshData {
  int dimension = 0;
  CellKind kind = CellKind::Simplex;
  std::vector<Point> vertices;
  std::array<std::vector<std::vector<Index>>, kMaxDim + 1> cells;
  std::array<Incidence, kMaxDim + 1> boundary;
  std::array<Incidence, kMaxDim + 1> cofaces;
  std::array<std::vector<double>, kMaxDim + 1> primal_measure;
  std::array<std::vector<double>, kMaxDim + 1> dual_measure;
  std::array<std::vector<std::uint8_t>, kMaxDim + 1> on_boundary;
  std::array<std::vector<Point>, kMaxDim + 1> circumcenter;
  std::vector<double> edge_face_share;
};

/// Immutable primal cell complex. Safe for concurrent reads.
class MeshComplex {
 public:
  MeshComplex() = default;
  explicit MeshComplex(MeshData data) : data_(std::move(data)) {}

  int dimension() const { return data_.dimension; }
  CellKind kind() const { return data_.kind; }
  Index num_cells(int k) const { return static_cast<Index>(data_.cells[k].size()); }
  Index num_vertices() const { return num_cells(0); }
  Index num_edges() const { return num_cells(1); }
  Index num_faces() const { return num_cells(2); }

  std::span<const Point> vertices() const { return data_.vertices; }
  const std::vector<Index>& cell(int k, Index i) const { return data_.cells[k][i]; }
  const Incidence& boundary(int k) const { return data_.boundary[k]; }
  const Incidence& cofaces(int k) const { return data_.cofaces[k]; }
  std::span<const double> primal_measure(int k) const { return data_.primal_measure[k]; }
  std::span<const double> dual_measure(int k) const { return data_.dual_measure[k]; }
  bool on_boundary(int k, Index i) const { return data_.on_boundary[k][i] != 0; }
  std::span<const std::uint8_t> boundary_flags(int k) const { return data_.on_boundary[k]; }
  const Point& circumcenter(int k, Index i) const { return data_.circumcenter[k][i]; }
  std::span<const double> edge_face_share() const { return data_.edge_face_share; }

  /// Looks up a cell by its sorted vertex tuple.
  std::optional<Index> find_cell(int k, std::span<const Index> sorted_vertices) const;

  /// Sum of top-cell measures.
  double total_volume() const;

  const MeshData& data() const { return data_; }

 private:
  MeshData data_;
};

// ---------------------------------------------------------------------------
// Builders

/// Tensor-product grid on [0, counts[i]*spacings[i]]. The number of entries
/// in `counts` fixes the dimension (2 or 3).
MeshComplex build_rect_grid(std::span<const Index> counts, std::span<const double> spacings);

/// Assembles a complex from top cells without the well-centredness check.
/// Tuples with dimension+1 entries are simplices, 2^dimension entries are
/// axis-aligned boxes. Throws InvalidMesh on bad indices or degenerate cells.
MeshComplex assemble_complex(int dimension, std::vector<Point> vertices,
                             const std::vector<std::vector<Index>>& top_cells);

/// Simplicial complex with circumcentric duals. Throws NotWellCentered if a
/// dual measure is not positive, InvalidMesh for any other defect.
MeshComplex build_simplicial(int dimension, std::vector<Point> vertices,
                             const std::vector<std::vector<Index>>& top_cells);

/// Shifted-row triangulation of [0, nx*hx] x [0, ny*hy] with interior
/// vertices jittered by up to jitter_fraction * spacing on each axis.
/// Deterministic for a fixed seed. A candidate that fails validation is
/// redrawn from the same random stream, at most kJitterRetries times.
inline constexpr int kJitterRetries = 100;
MeshComplex generate_jittered_triangulation(std::array<Index, 2> counts,
                                            std::array<double, 2> spacings,
                                            double jitter_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  std::string check;  // e.g. "boundary-of-boundary", "dual-measure"
  int degree = 0;
  Index cell = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(std::string_view check) const;
  std::string to_string() const;
};

ValidationReport validate(const MeshComplex& mesh);

}  // namespace emdec
