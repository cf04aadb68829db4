#include "emdec/uniform_integrator.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"

namespace emdec {

double cfl_estimate(const MeshComplex& mesh, const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv,
                    const CflOptions& options) {
  const Index ne = mesh.num_edges();
  const Index nf = mesh.num_faces();
  if (static_cast<Index>(hodge_eps.entries.size()) != ne || static_cast<Index>(hodge_mu_inv.entries.size()) != nf)
    throw Error(ErrorKind::InvalidArgument, "hodge sizes do not match the mesh");
  const auto flags = mesh.boundary_flags(1);

  std::vector<double> x(ne, 0.0), Mx(ne), curl(nf), H(nf), Kx(ne);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  for (Index e = 0; e < ne; ++e)
    if (!flags[e]) x[e] = unit(rng) * ((e % 2) ? 1.0 : -1.0);

  // K = dual_d *mu_inv d (symmetric), M = *eps; the Rayleigh quotient of M^-1 K
  // in the M inner product is x.Kx / x.Mx.
  auto apply_K = [&](const std::vector<double>& v) {
    kernels::incidence_apply(mesh.boundary(2), v, curl);
    kernels::diagonal_scale(hodge_mu_inv.entries, curl, H);
    kernels::incidence_apply(mesh.cofaces(1), H, Kx);
    for (Index e = 0; e < ne; ++e)
      if (flags[e]) Kx[e] = 0.0;
  };

  double lambda = 0.0;
  double lambda_checkpoint = 0.0;
  for (std::int64_t it = 1; it <= options.max_iters; ++it) {
    kernels::diagonal_scale(hodge_eps.entries, x, Mx);
    const double norm2 = kernels::dot(x, Mx);
    if (!(norm2 > 0.0)) throw Error(ErrorKind::EstimateFailed, "power iteration collapsed to zero");
    apply_K(x);
    lambda = kernels::dot(x, Kx) / norm2;
    // x <- M^-1 K x, normalised in the M norm
    double next_norm2 = 0.0;
    for (Index e = 0; e < ne; ++e) {
      x[e] = Kx[e] / hodge_eps.entries[e];
      next_norm2 += x[e] * x[e] * hodge_eps.entries[e];
    }
    const double scale = 1.0 / std::sqrt(next_norm2);
    for (double& v : x) v *= scale;

    if (it % options.check_every == 0) {
      if (lambda_checkpoint > 0.0 && std::abs(lambda - lambda_checkpoint) <= options.tolerance * lambda)
        return 2.0 / std::sqrt(lambda);
      lambda_checkpoint = lambda;
    }
  }
  throw Error(ErrorKind::EstimateFailed, "power iteration did not converge in " +
                                              std::to_string(options.max_iters) + " iterations");
}

// ---------------------------------------------------------------------------

UniformStepper::UniformStepper(const MeshComplex& mesh, DiagonalHodge hodge_eps, DiagonalHodge hodge_mu_inv,
                               double dt, std::shared_ptr<const SourceModel> sources, FieldState state,
                               StepperOptions options)
    : mesh_(&mesh),
      hodge_eps_(std::move(hodge_eps)),
      hodge_mu_inv_(std::move(hodge_mu_inv)),
      dt_(dt),
      sources_(std::move(sources)),
      state_(std::move(state)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (&state_.mesh() != mesh_) throw Error(ErrorKind::InvalidArgument, "state belongs to a different mesh");
  if (!sources_) sources_ = std::make_shared<ZeroSource>(mesh);
  if (hodge_eps_.degree != 1 || hodge_mu_inv_.degree != 2 ||
      static_cast<Index>(hodge_eps_.entries.size()) != mesh.num_edges() ||
      static_cast<Index>(hodge_mu_inv_.entries.size()) != mesh.num_faces())
    throw Error(ErrorKind::InvalidArgument, "hodge operators do not match the mesh");
  if (!satisfies_pec(state_)) throw Error(ErrorKind::InvalidArgument, "initial E is nonzero on a boundary edge");

  if (options.stability_guard) {
    cfl_bound_ = cfl_estimate(mesh, hodge_eps_, hodge_mu_inv_);
    if (dt_ > options.guard_fraction * cfl_bound_) {
      std::ostringstream os;
      os.precision(10);
      os << "dt " << dt_ << " exceeds " << options.guard_fraction << " x CFL bound " << cfl_bound_ << " (max dt "
         << options.guard_fraction * cfl_bound_ << ")";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }

  if (state_.synchronous()) {
    kernels::faraday_update(mesh.boundary(2), state_.E.values(), -0.5 * dt_, state_.B.values());
    state_.t_B = state_.t_E - 0.5 * dt_;
  } else if (std::abs(state_.t_B - (state_.t_E - 0.5 * dt_)) > 1e-12 * std::max(1.0, std::abs(state_.t_E))) {
    throw Error(ErrorKind::StaggerError, "state must be synchronous or have t_B = t_E - dt/2");
  }

  D_.resize(mesh.num_edges());
  kernels::diagonal_scale(hodge_eps_.entries, state_.E.values(), D_);
  if (!sources_->is_zero()) J_.resize(mesh.num_edges());
}

void UniformStepper::step() {
  const MeshComplex& mesh = *mesh_;
  kernels::faraday_update(mesh.boundary(2), state_.E.values(), dt_, state_.B.values());
  const double t_mid = state_.t_E + 0.5 * dt_;
  if (!J_.empty()) sources_->current(t_mid, J_);
  kernels::ampere_update(mesh.cofaces(1), state_.B.values(), hodge_mu_inv_.entries, J_, mesh.boundary_flags(1),
                         hodge_eps_.entries, dt_, D_, state_.E.values());
  ++steps_;
  state_.t_B = t_mid;
  state_.t_E = state_.t_E + dt_;
  if (!kernels::all_finite(state_.E.values()) || !kernels::all_finite(state_.B.values()))
    throw NumericalBlowup(steps_, -1, "non-finite field after step " + std::to_string(steps_));
}

void UniformStepper::reverse_time() {
  kernels::faraday_update(mesh_->boundary(2), state_.E.values(), dt_, state_.B.values());
  state_.t_B = state_.t_E + 0.5 * dt_;
  dt_ = -dt_;
}

// ---------------------------------------------------------------------------

Probe edge_probe(std::string name, Index edge) {
  return {std::move(name), [edge](const FieldState& s) { return s.E[edge]; }};
}

Trace conservation_trace(const std::vector<Probe>& probes) {
  std::vector<std::string> columns = kConservationColumns;
  for (const auto& p : probes) columns.push_back(p.name);
  return Trace(std::move(columns));
}

Trace run(UniformStepper& stepper, std::int64_t n_steps, const RecordOptions& record) {
  Trace trace = conservation_trace(record.probes);
  run(stepper, n_steps, record, trace);
  return trace;
}

void run(UniformStepper& stepper, std::int64_t n_steps, const RecordOptions& record, Trace& trace) {
  if (n_steps < 0) throw Error(ErrorKind::InvalidArgument, "n_steps must be >= 0");
  if (n_steps == 0) return;
  auto sample = [&] {
    const FieldState& s = stepper.state();
    std::vector<double> extra;
    for (const auto& p : record.probes) extra.push_back(p.sample(s));
    std::vector<double> row = conservation_values(s, stepper.sources(), stepper.hodge_eps(), stepper.hodge_mu_inv());
    row.insert(row.end(), extra.begin(), extra.end());
    for (double v : row)
      if (!std::isfinite(v))
        throw NumericalBlowup(stepper.steps_taken(), -1,
                              "diagnostics overflow after step " + std::to_string(stepper.steps_taken()));
    trace.append(s.t_E, std::move(row));
  };
  if (record.cadence > 0) sample();
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    stepper.step();
    if (record.cadence > 0 && i % record.cadence == 0) sample();
  }
}

}  // namespace emdec
