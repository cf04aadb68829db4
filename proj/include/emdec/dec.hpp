#pragma once

#include <span>
#include <string>
#include <vector>

#include "emdec/mesh.hpp"

namespace emdec {

/// Primal cochains live on k-cells. Dual cochains of dual degree k live on
/// the duals of primal (n-k)-cells and are indexed by those primal cells.
enum class Side { Primal, Dual };

class Cochain {
 public:
  /// Zero cochain. The mesh must outlive the cochain.
  Cochain(const MeshComplex& mesh, int degree, Side side = Side::Primal);
  Cochain(const MeshComplex& mesh, int degree, Side side, std::vector<double> values);

  int degree() const { return degree_; }
  Side side() const { return side_; }
  /// Degree of the primal cells the values are indexed by.
  int cell_degree() const { return side_ == Side::Primal ? degree_ : mesh_->dimension() - degree_; }
  const MeshComplex& mesh() const { return *mesh_; }

  Index size() const { return static_cast<Index>(values_.size()); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](Index i) const { return values_[i]; }
  double& operator[](Index i) { return values_[i]; }

  Cochain& operator+=(const Cochain& other);
  Cochain& operator*=(double s);

  friend bool operator==(const Cochain& a, const Cochain& b) {
    return a.mesh_ == b.mesh_ && a.degree_ == b.degree_ && a.side_ == b.side_ && a.values_ == b.values_;
  }

 private:
  const MeshComplex* mesh_;
  int degree_;
  Side side_;
  std::vector<double> values_;
};

Cochain operator+(Cochain a, const Cochain& b);
Cochain operator*(double s, Cochain a);

/// Per-cell material factors: epsilon on primal edges, mu on primal faces.
struct MaterialField {
  std::vector<double> epsilon;
  std::vector<double> mu;

  static MaterialField uniform(const MeshComplex& mesh, double epsilon = 1.0, double mu = 1.0);
};

enum class MaterialTag { Epsilon, MuInverse, Vacuum };

/// Lumped Hodge star: entries[i] = |*c_i| / |c_i| * material weight.
struct DiagonalHodge {
  int degree = 1;
  MaterialTag tag = MaterialTag::Vacuum;
  std::vector<double> entries;
};

/// Discrete exterior derivative of a primal cochain.
Cochain coboundary(const Cochain& c);

/// Exterior derivative on the dual complex, realised as the signed transpose
/// of the primal incidence.
Cochain dual_coboundary(const Cochain& c);

/// epsilon tag requires degree 1, mu_inverse degree 2; vacuum takes either.
DiagonalHodge build_hodge(const MeshComplex& mesh, int degree, const MaterialField& materials,
                          MaterialTag tag);

Cochain apply_hodge(const DiagonalHodge& h, const Cochain& c);
Cochain apply_hodge_inverse(const DiagonalHodge& h, const Cochain& dual);

}  // namespace emdec
