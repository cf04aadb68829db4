#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "emdec/dec.hpp"
#include "emdec/diagnostics.hpp"
#include "emdec/em_fields.hpp"

namespace emdec {

struct CflOptions {
  double tolerance = 1e-6;        // relative change of the Rayleigh quotient over a check window
  std::int64_t max_iters = 200000;
  std::int64_t check_every = 50;
};

/// Largest stable leapfrog step 2 / sqrt(lambda_max) of
/// *eps^-1 . dual_d . *mu_inv . d restricted to interior edges, with
/// lambda_max from power iteration. Throws EstimateFailed when the Rayleigh
/// quotient has not settled after max_iters.
double cfl_estimate(const MeshComplex& mesh, const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv,
                    const CflOptions& options = {});

struct StepperOptions {
  bool stability_guard = true;
  double guard_fraction = 0.95;  // dt must not exceed guard_fraction * cfl_estimate
};

/// Leapfrog stepper on any complex: Yee on rectangular grids, the prism
/// scheme on simplicial ones.
///
/// State convention: B is stored half a step behind E (t_B = t_E - dt/2).
/// One step performs
///   B <- B - dt d E                           (B reaches t_E + dt/2)
///   D <- D + dt (dual_d(*mu_inv B) - J(t_E + dt/2))   on interior edges
///   E <- *eps^-1 D,  t_E += dt
class UniformStepper {
 public:
  /// A synchronous state (t_B == t_E) is staggered here with a backward
  /// half step B <- B + dt/2 dE. A staggered state must satisfy
  /// t_B = t_E - dt/2. E must vanish on boundary edges.
  UniformStepper(const MeshComplex& mesh, DiagonalHodge hodge_eps, DiagonalHodge hodge_mu_inv, double dt,
                 std::shared_ptr<const SourceModel> sources, FieldState state, StepperOptions options = {});

  /// Advances one dt. Throws NumericalBlowup carrying the step index.
  void step();

  /// Moves B to t_E + dt/2 and flips the sign of dt, so subsequent steps
  /// retrace the trajectory backwards.
  void reverse_time();

  const FieldState& state() const { return state_; }
  std::span<const double> D() const { return D_; }
  double dt() const { return dt_; }
  std::int64_t steps_taken() const { return steps_; }
  const MeshComplex& mesh() const { return *mesh_; }
  const DiagonalHodge& hodge_eps() const { return hodge_eps_; }
  const DiagonalHodge& hodge_mu_inv() const { return hodge_mu_inv_; }
  const SourceModel& sources() const { return *sources_; }
  /// Stability bound computed at construction (0 when the guard is off).
  double cfl_bound() const { return cfl_bound_; }

 private:
  const MeshComplex* mesh_;
  DiagonalHodge hodge_eps_;
  DiagonalHodge hodge_mu_inv_;
  double dt_;
  std::shared_ptr<const SourceModel> sources_;
  FieldState state_;
  std::vector<double> D_;
  std::vector<double> J_;
  std::int64_t steps_ = 0;
  double cfl_bound_ = 0.0;
};

/// Scalar sampled from a state, recorded alongside the conservation columns.
struct Probe {
  std::string name;
  std::function<double(const FieldState&)> sample;
};

/// Probe returning E on one edge.
Probe edge_probe(std::string name, Index edge);

struct RecordOptions {
  std::int64_t cadence = 1;  // steps between samples; 0 disables recording
  std::vector<Probe> probes;
};

/// Empty trace with kConservationColumns followed by the probe names.
Trace conservation_trace(const std::vector<Probe>& probes);

/// Runs n_steps, sampling at step 0 and every `cadence` steps. Columns are
/// kConservationColumns followed by the probes. n_steps == 0 returns an
/// empty trace.
Trace run(UniformStepper& stepper, std::int64_t n_steps, const RecordOptions& record = {});
/// Same, appending to `trace` so samples survive a NumericalBlowup.
void run(UniformStepper& stepper, std::int64_t n_steps, const RecordOptions& record, Trace& trace);

}  // namespace emdec
