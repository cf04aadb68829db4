#pragma once

#include <cstdint>
#include <memory>
#include <queue>
#include <vector>

#include "emdec/dec.hpp"
#include "emdec/diagnostics.hpp"
#include "emdec/em_fields.hpp"
#include "emdec/uniform_integrator.hpp"

namespace emdec {

struct StepPolicy {
  enum class Kind { Uniform, PerFaceCfl, Random };
  Kind kind = Kind::Uniform;
  double dt = 0.0;       // uniform
  double safety = 0.5;   // per-face-cfl
  std::uint64_t seed = 0;  // random
  double min = 0.0;      // random: dt_f uniform in [min, max]
  double max = 0.0;
  bool relative = false;  // random: scale the draw by the per-face local bound

  static StepPolicy uniform(double dt);
  static StepPolicy per_face_cfl(double safety);
  static StepPolicy random(std::uint64_t seed, double min, double max, bool relative = false);
};

/// Local lumped stability bound 2 / sqrt(lambda_f) per face with
/// lambda_f = *mu_inv(f) * sum_{e in df} 1 / *eps(e).
std::vector<double> local_step_bounds(const MeshComplex& mesh, const DiagonalHodge& hodge_eps,
                                      const DiagonalHodge& hodge_mu_inv);

/// Per-face steps. Throws InvalidArgument when any result is not positive.
std::vector<double> assign_steps(const MeshComplex& mesh, const DiagonalHodge& hodge_eps,
                                 const DiagonalHodge& hodge_mu_inv, const StepPolicy& policy);

/// Firing schedule of one face: t_next = origin + fire_count * dt, with
/// origin = t0 + dt/2 so B sits at t0 + (k + 1/2) dt after k + 1 firings.
struct FaceClock {
  Index face = 0;
  double dt = 0.0;
  double origin = 0.0;
  std::int64_t fire_count = 0;

  double t_next() const { return origin + static_cast<double>(fire_count) * dt; }
};

/// Asynchronous variational integrator. Each face advances B with its own
/// step and kicks the E values on its interior edges.
///
/// A firing of face f at t = t_next:
///   B(f) <- B(f) - sum_e sign(f,e) int_{t - dt_f}^{t} E(e) dt
///   D(e) <- D(e) + sign(f,e) dt_f H(f) - share(f,e) dt_f J(t, e)   (interior e)
///   E(e) <- D(e) / *eps(e)
/// The E integral is exact for the piecewise-constant history of E, which
/// jumps at every kick; kicks landing at exactly t before f fires are
/// excluded. With equal dt_f this reproduces UniformStepper bitwise for
/// J = 0.
class AsyncIntegrator {
 public:
  /// `state` must be synchronous at t0 and satisfy PEC.
  AsyncIntegrator(const MeshComplex& mesh, DiagonalHodge hodge_eps, DiagonalHodge hodge_mu_inv,
                  std::vector<double> face_dt, std::shared_ptr<const SourceModel> sources, FieldState state);

  /// Fires the face with the smallest (t_next, index) and returns its clock
  /// as it was before firing. Throws NumericalBlowup(fire_count, face).
  FaceClock step();

  /// Fires every face whose t_next <= T. The integrator time becomes T.
  void run_until(double T);

  /// Same, sampling at t0 + k * interval for every such time <= T (including
  /// the current time when it lies on the grid and has not been sampled).
  Trace run_until(double T, double interval, const std::vector<Probe>& probes = {});
  /// Same, appending to `trace` so samples survive a NumericalBlowup.
  void run_until(double T, double interval, const std::vector<Probe>& probes, Trace& trace);

  /// Staggered energy 1/2 <E, *eps E> + 1/2 sum_f B(f) *mu_inv(f) B'(f),
  /// where B' is B(f) advanced over its pending interval with the current E.
  double energy() const;

  /// Synchronous state at the current time: every B(f) is advanced from its
  /// own time to now along the recorded E history.
  FieldState snapshot() const;

  /// dual_d(D) - rho at the current time.
  Cochain gauss_residual() const;

  double time() const { return time_; }
  double next_time() const;
  std::int64_t total_firings() const { return firings_; }
  const std::vector<FaceClock>& clocks() const { return clocks_; }
  /// Time at which each B(f) currently sits.
  double face_time(Index f) const { return tau_[f]; }
  std::span<const double> E() const { return E_; }
  std::span<const double> B() const { return B_; }
  std::span<const double> D() const { return D_; }
  const MeshComplex& mesh() const { return *mesh_; }
  const SourceModel& sources() const { return *sources_; }

 private:
  struct Event {
    double t;
    Index face;
    bool operator>(const Event& o) const { return t > o.t || (t == o.t && face > o.face); }
  };

  double pending_integral(Index slot, Index edge, double dt) const;
  void kick(Index edge, double t, double E_old, double E_new);

  const MeshComplex* mesh_;
  DiagonalHodge hodge_eps_;
  DiagonalHodge hodge_mu_inv_;
  std::shared_ptr<const SourceModel> sources_;
  double t0_;
  double time_;
  std::int64_t firings_ = 0;

  std::vector<double> E_, B_, D_;
  std::vector<double> edge_time_;  // time of the last kick per edge
  std::vector<FaceClock> clocks_;
  std::vector<double> tau_;        // current time of B(f)

  // Per (face, edge) slot of boundary(2): E integral bookkeeping over the
  // face's pending interval.
  std::vector<double> corr_;
  std::vector<double> pre_;
  std::vector<std::uint8_t> has_pre_;
  std::vector<Index> coface_slot_;  // cofaces(1) entry -> boundary(2) slot

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
};

}  // namespace emdec
