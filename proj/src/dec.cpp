#include "emdec/dec.hpp"

#include <algorithm>
#include <cmath>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"

namespace emdec {

namespace {

Index cells_for(const MeshComplex& mesh, int degree, Side side) {
  const int n = mesh.dimension();
  if (degree < 0 || degree > n) throw Error(ErrorKind::InvalidArgument, "cochain degree out of range");
  return mesh.num_cells(side == Side::Primal ? degree : n - degree);
}

void require_finite(std::span<const double> v, const char* what) {
  if (!kernels::all_finite(v)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " produced non-finite values");
}

}  // namespace

Cochain::Cochain(const MeshComplex& mesh, int degree, Side side)
    : mesh_(&mesh), degree_(degree), side_(side), values_(cells_for(mesh, degree, side), 0.0) {}

Cochain::Cochain(const MeshComplex& mesh, int degree, Side side, std::vector<double> values)
    : mesh_(&mesh), degree_(degree), side_(side), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != cells_for(mesh, degree, side))
    throw Error(ErrorKind::InvalidArgument, "cochain length does not match cell count");
}

Cochain& Cochain::operator+=(const Cochain& other) {
  if (other.mesh_ != mesh_ || other.degree_ != degree_ || other.side_ != side_)
    throw Error(ErrorKind::InvalidArgument, "adding cochains of different kinds");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Cochain& Cochain::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
Cochain operator*(double s, Cochain a) { return a *= s; }

MaterialField MaterialField::uniform(const MeshComplex& mesh, double epsilon, double mu) {
  return {std::vector<double>(mesh.num_edges(), epsilon), std::vector<double>(mesh.num_faces(), mu)};
}

Cochain coboundary(const Cochain& c) {
  const MeshComplex& mesh = c.mesh();
  if (c.side() != Side::Primal) throw Error(ErrorKind::InvalidArgument, "coboundary takes a primal cochain");
  if (c.degree() >= mesh.dimension()) throw Error(ErrorKind::InvalidArgument, "coboundary degree out of range");
  Cochain out(mesh, c.degree() + 1);
  kernels::incidence_apply(mesh.boundary(c.degree() + 1), c.values(), out.values());
  require_finite(out.values(), "coboundary");
  return out;
}

Cochain dual_coboundary(const Cochain& c) {
  const MeshComplex& mesh = c.mesh();
  if (c.side() != Side::Dual) throw Error(ErrorKind::InvalidArgument, "dual_coboundary takes a dual cochain");
  if (c.degree() >= mesh.dimension())
    throw Error(ErrorKind::InvalidArgument, "dual_coboundary degree out of range");
  const int target = c.cell_degree() - 1;  // primal degree of the output's index cells
  Cochain out(mesh, c.degree() + 1, Side::Dual);
  kernels::incidence_apply(mesh.cofaces(target), c.values(), out.values());
  require_finite(out.values(), "dual_coboundary");
  return out;
}

DiagonalHodge build_hodge(const MeshComplex& mesh, int degree, const MaterialField& materials,
                          MaterialTag tag) {
  if (degree != 1 && degree != 2) throw Error(ErrorKind::InvalidArgument, "hodge degree must be 1 or 2");
  if (tag == MaterialTag::Epsilon && degree != 1)
    throw Error(ErrorKind::InvalidArgument, "epsilon hodge acts on degree 1");
  if (tag == MaterialTag::MuInverse && degree != 2)
    throw Error(ErrorKind::InvalidArgument, "mu_inverse hodge acts on degree 2");
  const auto primal = mesh.primal_measure(degree);
  const auto dual = mesh.dual_measure(degree);
  DiagonalHodge h{degree, tag, std::vector<double>(primal.size())};
  const std::vector<double>* weights = nullptr;
  if (tag == MaterialTag::Epsilon) weights = &materials.epsilon;
  if (tag == MaterialTag::MuInverse) weights = &materials.mu;
  if (weights && weights->size() != primal.size())
    throw Error(ErrorKind::InvalidArgument, "material array length does not match cell count");
  for (std::size_t i = 0; i < primal.size(); ++i) {
    double w = 1.0;
    if (weights) {
      const double m = (*weights)[i];
      if (!(m > 0.0) || !std::isfinite(m))
        throw Error(ErrorKind::InvalidArgument, "material value must be positive at cell " + std::to_string(i));
      w = tag == MaterialTag::Epsilon ? m : 1.0 / m;
    }
    h.entries[i] = dual[i] / primal[i] * w;
  }
  return h;
}

Cochain apply_hodge(const DiagonalHodge& h, const Cochain& c) {
  if (c.side() != Side::Primal || c.degree() != h.degree)
    throw Error(ErrorKind::InvalidArgument, "hodge degree mismatch");
  const MeshComplex& mesh = c.mesh();
  Cochain out(mesh, mesh.dimension() - h.degree, Side::Dual);
  kernels::diagonal_scale(h.entries, c.values(), out.values());
  return out;
}

Cochain apply_hodge_inverse(const DiagonalHodge& h, const Cochain& dual) {
  const MeshComplex& mesh = dual.mesh();
  if (dual.side() != Side::Dual || dual.degree() != mesh.dimension() - h.degree)
    throw Error(ErrorKind::InvalidArgument, "hodge degree mismatch");
  Cochain out(mesh, h.degree);
  for (Index i = 0; i < dual.size(); ++i) out[i] = dual[i] / h.entries[i];
  return out;
}

}  // namespace emdec
