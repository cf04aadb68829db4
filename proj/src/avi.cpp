#include "emdec/avi.hpp"

#include <cmath>
#include <random>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"

namespace emdec {

StepPolicy StepPolicy::uniform(double dt) {
  StepPolicy p;
  p.kind = Kind::Uniform;
  p.dt = dt;
  return p;
}

StepPolicy StepPolicy::per_face_cfl(double safety) {
  StepPolicy p;
  p.kind = Kind::PerFaceCfl;
  p.safety = safety;
  return p;
}

StepPolicy StepPolicy::random(std::uint64_t seed, double min, double max, bool relative) {
  StepPolicy p;
  p.kind = Kind::Random;
  p.seed = seed;
  p.min = min;
  p.max = max;
  p.relative = relative;
  return p;
}

std::vector<double> local_step_bounds(const MeshComplex& mesh, const DiagonalHodge& hodge_eps,
                                      const DiagonalHodge& hodge_mu_inv) {
  const Incidence& fe = mesh.boundary(2);
  std::vector<double> out(mesh.num_faces());
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    double inv_eps = 0.0;
    for (Index e : fe.row_targets(f)) inv_eps += 1.0 / hodge_eps.entries[e];
    out[f] = 2.0 / std::sqrt(hodge_mu_inv.entries[f] * inv_eps);
  }
  return out;
}

std::vector<double> assign_steps(const MeshComplex& mesh, const DiagonalHodge& hodge_eps,
                                 const DiagonalHodge& hodge_mu_inv, const StepPolicy& policy) {
  const Index nf = mesh.num_faces();
  std::vector<double> dt(nf);
  switch (policy.kind) {
    case StepPolicy::Kind::Uniform:
      std::fill(dt.begin(), dt.end(), policy.dt);
      break;
    case StepPolicy::Kind::PerFaceCfl: {
      dt = local_step_bounds(mesh, hodge_eps, hodge_mu_inv);
      for (double& v : dt) v *= policy.safety;
      break;
    }
    case StepPolicy::Kind::Random: {
      if (!(policy.min <= policy.max)) throw Error(ErrorKind::InvalidArgument, "random steps need min <= max");
      std::mt19937_64 rng(policy.seed);
      std::uniform_real_distribution<double> draw(policy.min, policy.max);
      std::vector<double> scale(nf, 1.0);
      if (policy.relative) scale = local_step_bounds(mesh, hodge_eps, hodge_mu_inv);
      for (Index f = 0; f < nf; ++f) dt[f] = (policy.min == policy.max ? policy.min : draw(rng)) * scale[f];
      break;
    }
  }
  for (Index f = 0; f < nf; ++f)
    if (!(dt[f] > 0.0) || !std::isfinite(dt[f]))
      throw Error(ErrorKind::InvalidArgument, "step for face " + std::to_string(f) + " is not positive");
  return dt;
}

// ---------------------------------------------------------------------------

AsyncIntegrator::AsyncIntegrator(const MeshComplex& mesh, DiagonalHodge hodge_eps, DiagonalHodge hodge_mu_inv,
                                 std::vector<double> face_dt, std::shared_ptr<const SourceModel> sources,
                                 FieldState state)
    : mesh_(&mesh),
      hodge_eps_(std::move(hodge_eps)),
      hodge_mu_inv_(std::move(hodge_mu_inv)),
      sources_(std::move(sources)),
      t0_(state.t_E),
      time_(state.t_E) {
  const Index ne = mesh.num_edges();
  const Index nf = mesh.num_faces();
  if (&state.mesh() != mesh_) throw Error(ErrorKind::InvalidArgument, "state belongs to a different mesh");
  if (!state.synchronous()) throw Error(ErrorKind::StaggerError, "asynchronous integration starts from a synchronous state");
  if (!satisfies_pec(state)) throw Error(ErrorKind::InvalidArgument, "initial E is nonzero on a boundary edge");
  if (static_cast<Index>(face_dt.size()) != nf) throw Error(ErrorKind::InvalidArgument, "one step per face expected");
  if (static_cast<Index>(hodge_eps_.entries.size()) != ne || static_cast<Index>(hodge_mu_inv_.entries.size()) != nf)
    throw Error(ErrorKind::InvalidArgument, "hodge operators do not match the mesh");
  if (!sources_) sources_ = std::make_shared<ZeroSource>(mesh);

  E_.assign(state.E.values().begin(), state.E.values().end());
  B_.assign(state.B.values().begin(), state.B.values().end());
  D_.resize(ne);
  kernels::diagonal_scale(hodge_eps_.entries, E_, D_);
  edge_time_.assign(ne, t0_);

  const Incidence& fe = mesh.boundary(2);
  const Incidence& ef = mesh.cofaces(1);
  corr_.assign(fe.nnz(), 0.0);
  pre_.assign(fe.nnz(), 0.0);
  has_pre_.assign(fe.nnz(), 0);
  coface_slot_.resize(ef.nnz());
  for (Index e = 0; e < ne; ++e) {
    for (Index j = ef.offsets[e]; j < ef.offsets[e + 1]; ++j) {
      const Index g = ef.targets[j];
      Index slot = -1;
      for (Index s = fe.offsets[g]; s < fe.offsets[g + 1]; ++s)
        if (fe.targets[s] == e) slot = s;
      coface_slot_[j] = slot;
    }
  }

  clocks_.resize(nf);
  tau_.resize(nf);
  for (Index f = 0; f < nf; ++f) {
    const double dt = face_dt[f];
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw Error(ErrorKind::InvalidArgument, "step for face " + std::to_string(f) + " is not positive");
    // stagger B(f) back to t0 - dt/2, same arithmetic as the uniform bootstrap
    const double half = -0.5 * dt;
    double acc = 0.0;
    for (Index s = fe.offsets[f]; s < fe.offsets[f + 1]; ++s) acc += fe.signs[s] * (half * E_[fe.targets[s]]);
    B_[f] -= acc;
    tau_[f] = t0_ + half;
    clocks_[f] = FaceClock{f, dt, t0_ + 0.5 * dt, 0};
    queue_.push({clocks_[f].t_next(), f});
  }
}

double AsyncIntegrator::next_time() const {
  return queue_.empty() ? INFINITY : queue_.top().t;
}

double AsyncIntegrator::pending_integral(Index slot, Index edge, double dt) const {
  return (has_pre_[slot] ? pre_[slot] : E_[edge]) * dt - corr_[slot];
}

void AsyncIntegrator::kick(Index edge, double t, double E_old, double E_new) {
  const Incidence& ef = mesh_->cofaces(1);
  for (Index j = ef.offsets[edge]; j < ef.offsets[edge + 1]; ++j) {
    const Index g = ef.targets[j];
    const Index slot = coface_slot_[j];
    if (t == clocks_[g].t_next()) {
      // g fires at this same instant, after this kick: its interval ends
      // with the value before the kick
      if (!has_pre_[slot]) {
        pre_[slot] = E_old;
        has_pre_[slot] = 1;
      }
    } else if (!has_pre_[slot]) {
      corr_[slot] += (E_new - E_old) * (t - tau_[g]);
    }
  }
  edge_time_[edge] = t;
}

FaceClock AsyncIntegrator::step() {
  if (queue_.empty()) throw Error(ErrorKind::InvalidArgument, "event queue is empty");
  const Index f = queue_.top().face;
  queue_.pop();
  const FaceClock fired = clocks_[f];
  const double t = fired.t_next();
  const double dt = fired.dt;
  const Incidence& fe = mesh_->boundary(2);
  const Incidence& ef = mesh_->cofaces(1);
  const auto flags = mesh_->boundary_flags(1);

  // (2) E advances B over [t - dt, t]
  double acc = 0.0;
  for (Index s = fe.offsets[f]; s < fe.offsets[f + 1]; ++s) {
    acc += fe.signs[s] * pending_integral(s, fe.targets[s], dt);
    corr_[s] = 0.0;
    has_pre_[s] = 0;
  }
  B_[f] -= acc;
  tau_[f] = t;
  ++clocks_[f].fire_count;
  ++firings_;
  time_ = std::max(time_, t);

  // (3) B advances E on the interior edges of f
  const double H = hodge_mu_inv_.entries[f] * B_[f];
  const bool source = !sources_->is_zero();
  bool finite = std::isfinite(B_[f]);
  for (Index s = fe.offsets[f]; s < fe.offsets[f + 1]; ++s) {
    const Index e = fe.targets[s];
    if (flags[e]) continue;
    double d = D_[e] + fe.signs[s] * (dt * H);
    if (source) {
      double share = 0.0;
      for (Index j = ef.offsets[e]; j < ef.offsets[e + 1]; ++j)
        if (ef.targets[j] == f) share = mesh_->edge_face_share()[j];
      d = d - (share * dt) * sources_->current_at(t, e);
    }
    D_[e] = d;
    const double E_old = E_[e];
    E_[e] = d / hodge_eps_.entries[e];
    finite = finite && std::isfinite(E_[e]);
    kick(e, t, E_old, E_[e]);
  }
  if (!finite)
    throw NumericalBlowup(clocks_[f].fire_count, f,
                          "non-finite field at firing " + std::to_string(clocks_[f].fire_count) + " of face " +
                              std::to_string(f) + " (t = " + std::to_string(t) + ")");
  queue_.push({clocks_[f].t_next(), f});
  return fired;
}

void AsyncIntegrator::run_until(double T) {
  if (T < time_) throw Error(ErrorKind::InvalidArgument, "run_until cannot go back in time");
  while (!queue_.empty() && queue_.top().t <= T) step();
  time_ = T;
}

Trace AsyncIntegrator::run_until(double T, double interval, const std::vector<Probe>& probes) {
  Trace trace = conservation_trace(probes);
  run_until(T, interval, probes, trace);
  return trace;
}

void AsyncIntegrator::run_until(double T, double interval, const std::vector<Probe>& probes, Trace& trace) {
  if (!(interval > 0.0)) throw Error(ErrorKind::InvalidArgument, "sampling interval must be positive");
  if (T < time_) throw Error(ErrorKind::InvalidArgument, "run_until cannot go back in time");

  auto sample = [&] {
    const FieldState s = snapshot();
    std::vector<double> row{energy(), max_abs_interior(gauss_residual()), 0.0};
    if (mesh_->dimension() == 3)
      for (double v : div_b_residual(s).values()) row[2] = std::max(row[2], std::abs(v));
    for (const auto& p : probes) row.push_back(p.sample(s));
    for (double v : row)
      if (!std::isfinite(v))
        throw NumericalBlowup(firings_, -1, "diagnostics overflow at t = " + std::to_string(time_));
    trace.append(time_, std::move(row));
  };

  auto k = static_cast<std::int64_t>(std::ceil((time_ - t0_) / interval - 1e-9));
  for (;; ++k) {
    const double ts = std::max(time_, t0_ + static_cast<double>(k) * interval);
    if (ts > T) break;
    if (!trace.empty() && ts <= trace.times().back()) continue;
    run_until(ts);
    sample();
  }
  run_until(T);
}

double AsyncIntegrator::energy() const {
  const Incidence& fe = mesh_->boundary(2);
  std::vector<double> b_next(B_);
  for (Index f = 0; f < mesh_->num_faces(); ++f) {
    double acc = 0.0;
    for (Index s = fe.offsets[f]; s < fe.offsets[f + 1]; ++s)
      acc += fe.signs[s] * pending_integral(s, fe.targets[s], clocks_[f].dt);
    b_next[f] -= acc;
  }
  return energy_from_parts(*mesh_, E_, B_, b_next, hodge_eps_, hodge_mu_inv_);
}

FieldState AsyncIntegrator::snapshot() const {
  const Incidence& fe = mesh_->boundary(2);
  FieldState s(*mesh_, time_);
  std::copy(E_.begin(), E_.end(), s.E.values().begin());
  for (Index f = 0; f < mesh_->num_faces(); ++f) {
    double acc = 0.0;
    for (Index slot = fe.offsets[f]; slot < fe.offsets[f + 1]; ++slot)
      acc += fe.signs[slot] * pending_integral(slot, fe.targets[slot], time_ - tau_[f]);
    s.B[f] = B_[f] - acc;
  }
  return s;
}

Cochain AsyncIntegrator::gauss_residual() const {
  return emdec::gauss_residual(*mesh_, D_, *sources_, time_);
}

}  // namespace emdec
