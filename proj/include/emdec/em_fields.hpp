#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "emdec/dec.hpp"

namespace emdec {

/// E on primal edges (line integrals), B on primal faces (fluxes).
/// A state is synchronous when t_B == t_E; steppers keep B half a step behind
/// E (t_B = t_E - dt/2).
struct FieldState {
  Cochain E;
  Cochain B;
  double t_E = 0.0;
  double t_B = 0.0;

  explicit FieldState(const MeshComplex& mesh, double t0 = 0.0)
      : E(mesh, 1), B(mesh, 2), t_E(t0), t_B(t0) {}

  const MeshComplex& mesh() const { return E.mesh(); }
  bool synchronous() const { return t_E == t_B; }
};

/// True when E vanishes on every boundary edge.
bool satisfies_pec(const FieldState& state);

/// Time-dependent current J (through each edge's dual face) and charge rho
/// (in each vertex's dual cell).
class SourceModel {
 public:
  virtual ~SourceModel() = default;

  virtual void current(double t, std::span<double> J) const = 0;
  virtual void charge(double t, std::span<double> rho) const = 0;
  /// Current through a single edge. The default evaluates the full array.
  virtual double current_at(double t, Index edge) const;
  virtual bool is_zero() const { return false; }
  virtual std::string describe() const = 0;

 protected:
  explicit SourceModel(const MeshComplex& mesh) : mesh_(&mesh) {}
  const MeshComplex& mesh() const { return *mesh_; }

 private:
  const MeshComplex* mesh_;
};

class ZeroSource final : public SourceModel {
 public:
  explicit ZeroSource(const MeshComplex& mesh) : SourceModel(mesh) {}
  void current(double, std::span<double> J) const override;
  void charge(double, std::span<double> rho) const override;
  double current_at(double, Index) const override { return 0.0; }
  bool is_zero() const override { return true; }
  std::string describe() const override { return "zero"; }
};

/// Oscillating dipole on one edge from `tail` to `head`:
///   rho(tail) = s*q*sin(wt), rho(head) = -s*q*sin(wt), J(edge) = q*w_eff*cos(wt)
/// with s = charge_scale. w_eff = (2/dt_q) sin(w dt_q / 2) makes midpoint
/// sampling with step dt_q telescope exactly; dt_q = 0 gives w_eff = w.
class DipoleSource final : public SourceModel {
 public:
  DipoleSource(const MeshComplex& mesh, Index edge, double q, double omega, double quadrature_dt = 0.0,
               double charge_scale = 1.0);
  void current(double t, std::span<double> J) const override;
  void charge(double t, std::span<double> rho) const override;
  double current_at(double t, Index edge) const override;
  std::string describe() const override;

  Index edge() const { return edge_; }
  Index tail() const { return tail_; }
  Index head() const { return head_; }

 private:
  Index edge_, tail_, head_;
  double q_, omega_, omega_eff_, charge_scale_;
};

/// Source given by callbacks filling whole arrays.
class FunctionSource final : public SourceModel {
 public:
  using Fill = std::function<void(double, std::span<double>)>;
  FunctionSource(const MeshComplex& mesh, Fill current, Fill charge, std::string name = "function");
  void current(double t, std::span<double> J) const override { current_(t, J); }
  void charge(double t, std::span<double> rho) const override { charge_(t, rho); }
  std::string describe() const override { return name_; }

 private:
  Fill current_, charge_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Constraint residuals

/// dual_coboundary(D) - rho per vertex, with D = *eps E. Entries at boundary
/// vertices are included but their dual cells are truncated; use
/// max_abs_interior() for the conserved part.
Cochain gauss_residual(const FieldState& state, const DiagonalHodge& hodge_eps,
                       const SourceModel& sources);
/// Same, from an explicit D accumulator and a time for rho.
Cochain gauss_residual(const MeshComplex& mesh, std::span<const double> D, const SourceModel& sources,
                       double t);

double max_abs_interior(const Cochain& vertex_values);

/// coboundary(B) per 3-cell. Throws Unsupported in 2D.
Cochain div_b_residual(const FieldState& state);

struct ContinuityReport {
  double max_residual = 0.0;
  double charge_scale = 0.0;
  double tolerance = 0.0;
  std::vector<double> per_vertex;  // max |residual| over the window
  std::vector<Index> offending;
  bool passed = false;

  std::string to_string() const;
};

inline constexpr double kDefaultContinuityTolerance = 1e-10;

/// Checks rho(t1) - rho(t0) + integral of dual_coboundary(J) = 0 per vertex,
/// sampling J at interval midpoints with step <= dt_sample. The check is
/// cumulative from t0 at every sample point. Passes iff the maximum residual
/// is <= tolerance * max |rho|.
ContinuityReport validate_continuity(const SourceModel& source, const MeshComplex& mesh, double t0,
                                     double t1, double dt_sample,
                                     double tolerance = kDefaultContinuityTolerance);

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioParams {
  std::vector<int> modes{1, 1, 1};  // cavity-mode indices (m, n[, p])
  double amplitude = 1.0;
  std::uint64_t seed = 7;           // random-noise
  double charge = 1.0;              // dipole amplitude q
  double omega = 3.0;               // dipole angular frequency
  double quadrature_dt = 0.0;       // dipole midpoint step, usually the integrator dt
  double charge_scale = 1.0;        // != 1 produces an inconsistent source
  Index dipole_edge = -1;           // -1: interior edge nearest the domain centre
};

struct Scenario {
  FieldState state;
  std::shared_ptr<const SourceModel> sources;
  double omega = 0.0;  // analytic angular frequency where one exists
};

/// Returns a synchronous, PEC-respecting state at t = 0.
/// Names: vacuum-zero, cavity-mode, dipole-current, random-noise.
Scenario init_scenario(const std::string& name, const MeshComplex& mesh, const MaterialField& materials,
                       const ScenarioParams& params = {});

std::vector<std::string> scenario_names();

/// Analytic cavity angular frequency for the mesh's bounding box (c = 1).
double cavity_omega(const MeshComplex& mesh, const std::vector<int>& modes);

/// Index of the interior edge whose midpoint is closest to `p` (lowest index
/// on ties).
Index nearest_interior_edge(const MeshComplex& mesh, const Point& p);

// ---------------------------------------------------------------------------
// Field dump

void write_fields(std::ostream& out, const FieldState& state);
void write_fields_file(const std::string& path, const FieldState& state);
FieldState read_fields(std::istream& in, const MeshComplex& mesh);

}  // namespace emdec
