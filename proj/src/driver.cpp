#include "emdec/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "emdec/avi.hpp"
#include "emdec/error.hpp"
#include "emdec/mesh_io.hpp"
#include "emdec/uniform_integrator.hpp"

namespace emdec {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Unsupported:
      return kExitConfig;
    case ErrorKind::InvalidMesh:
    case ErrorKind::NotWellCentered:
    case ErrorKind::GenerationFailed:
      return kExitValidation;
    case ErrorKind::NumericalBlowup:
      return kExitBlowup;
    default:
      return kExitOther;
  }
}

bool inside(const MaterialRegion& r, const Point& p) {
  for (int a = 0; a < 3; ++a)
    if (p[a] < r.lo[a] || p[a] > r.hi[a]) return false;
  return true;
}

std::string probe_name(Index edge) { return "E_edge" + std::to_string(edge); }

}  // namespace

MeshComplex build_mesh(const RunConfig& c) {
  if (c.mesh_type == "file") return read_mesh_file(c.mesh_file);
  std::vector<double> spacing(c.cells.size());
  for (std::size_t a = 0; a < c.cells.size(); ++a) spacing[a] = c.size[a] / c.cells[a];
  if (c.mesh_type == "jittered")
    return generate_jittered_triangulation({c.cells[0], c.cells[1]}, {spacing[0], spacing[1]}, c.jitter, c.seed);
  return build_rect_grid(c.cells, spacing);
}

MaterialField build_materials(const MeshComplex& mesh, const RunConfig& c) {
  MaterialField m = MaterialField::uniform(mesh, c.epsilon, c.mu);
  for (const auto& r : c.regions) {
    for (Index e = 0; e < mesh.num_edges(); ++e)
      if (inside(r, mesh.circumcenter(1, e))) m.epsilon[e] = r.epsilon;
    for (Index f = 0; f < mesh.num_faces(); ++f)
      if (inside(r, mesh.circumcenter(2, f))) m.mu[f] = r.mu;
  }
  return m;
}

int cmd_run(const RunConfig& c, std::ostream& log) {
  namespace fs = std::filesystem;
  std::ostringstream derived;  // resolved quantities appended to the manifest
  derived << std::setprecision(17);
  Trace trace;
  auto write_outputs = [&](const FieldState* final_state) {
    fs::create_directories(c.out_dir);
    const fs::path dir(c.out_dir);
    trace.write_csv_file((dir / "trace.csv").string());
    if (final_state) write_fields_file((dir / "fields.txt").string(), *final_state);
    std::ofstream manifest(dir / "run-manifest", std::ios::binary);
    if (!manifest) throw Error(ErrorKind::IoError, "cannot write run-manifest in " + c.out_dir);
    write_config(manifest, c);
    manifest << "\n# resolved\n" << derived.str();
  };

  try {
    const MeshComplex mesh = build_mesh(c);
    const ValidationReport report = validate(mesh);
    if (!report.ok()) {
      log << "mesh validation failed:\n" << report.to_string();
      return kExitValidation;
    }
    if (c.mesh_type == "file" && c.scenario == "cavity-mode" &&
        c.modes.size() != static_cast<std::size_t>(mesh.dimension()))
      throw Error(ErrorKind::ConfigError, "scenario.modes: needs one index per mesh dimension");
    derived << "# mesh: dimension " << mesh.dimension() << ", " << mesh.num_vertices() << " vertices, "
            << mesh.num_edges() << " edges, " << mesh.num_faces() << " faces\n";

    const MaterialField materials = build_materials(mesh, c);
    const DiagonalHodge hodge_eps = build_hodge(mesh, 1, materials, MaterialTag::Epsilon);
    const DiagonalHodge hodge_mu_inv = build_hodge(mesh, 2, materials, MaterialTag::MuInverse);

    const bool avi = c.integrator == "avi";
    const bool needs_cfl = !avi || c.policy == "uniform";
    double cfl = 0.0;
    double dt = c.dt;
    if (needs_cfl && (c.dt == 0.0 || c.stability_guard)) {
      cfl = cfl_estimate(mesh, hodge_eps, hodge_mu_inv);
      derived << "# cfl_estimate = " << cfl << '\n';
    }
    if (needs_cfl && dt == 0.0) dt = c.cfl_fraction * cfl;
    if (needs_cfl && c.stability_guard && dt > c.guard_fraction * cfl) {
      std::ostringstream os;
      os << std::setprecision(10) << "integrator.dt: " << dt << " exceeds the stability bound " << c.guard_fraction
         << " x cfl_estimate = " << c.guard_fraction * cfl << " (cfl_estimate " << cfl
         << "); lower dt or set stability_guard = false";
      throw Error(ErrorKind::ConfigError, os.str());
    }

    std::vector<double> face_dt;
    if (avi) {
      StepPolicy policy;
      if (c.policy == "uniform") policy = StepPolicy::uniform(dt);
      else if (c.policy == "per-face-cfl") policy = StepPolicy::per_face_cfl(c.safety);
      else if (c.random_relative)
        policy = StepPolicy::random(c.seed, c.safety * c.random_min, c.safety * c.random_max, true);
      else policy = StepPolicy::random(c.seed, c.random_min, c.random_max, false);
      face_dt = assign_steps(mesh, hodge_eps, hodge_mu_inv, policy);
      const auto [lo, hi] = std::minmax_element(face_dt.begin(), face_dt.end());
      derived << "# face dt range = [" << *lo << ", " << *hi << "]\n";
    } else {
      derived << "# dt = " << dt << '\n';
    }

    ScenarioParams params;
    params.modes = c.modes;
    params.amplitude = c.amplitude;
    params.seed = c.seed;
    params.charge = c.charge;
    params.omega = c.omega;
    // the continuity check samples J at this step, so the dipole is built to telescope on it
    const double dt_sample = avi ? *std::min_element(face_dt.begin(), face_dt.end()) : dt;
    params.quadrature_dt = dt_sample;
    params.charge_scale = c.charge_scale;
    params.dipole_edge = c.dipole_edge;
    Scenario scenario = init_scenario(c.scenario, mesh, materials, params);

    std::int64_t steps = c.steps;
    if (!avi && c.duration > 0.0) steps = std::llround(c.duration / dt);
    const double t_end = avi ? c.duration : static_cast<double>(steps) * dt;

    if (!scenario.sources->is_zero() && t_end > 0.0) {
      const double window = std::ceil(t_end / dt_sample * (1.0 - 1e-12)) * dt_sample;
      const ContinuityReport cont =
          validate_continuity(*scenario.sources, mesh, 0.0, window, dt_sample, c.continuity_tolerance);
      if (!cont.passed) {
        log << "source " << scenario.sources->describe() << " is inconsistent with charge continuity\n"
            << cont.to_string();
        return kExitValidation;
      }
    }

    std::vector<Probe> probes;
    for (const auto& p : c.probes) {
      const Index e = nearest_interior_edge(mesh, p);
      probes.push_back(edge_probe(probe_name(e), e));
      derived << "# probe " << probe_name(e) << " at (" << p[0] << ", " << p[1] << ", " << p[2] << ")\n";
    }
    trace = conservation_trace(probes);

    try {
      if (avi) {
        AsyncIntegrator integrator(mesh, hodge_eps, hodge_mu_inv, face_dt, scenario.sources, scenario.state);
        const double mean_dt = std::accumulate(face_dt.begin(), face_dt.end(), 0.0) / face_dt.size();
        const double interval = c.sample_interval > 0.0 ? c.sample_interval : 10.0 * mean_dt;
        derived << "# sample_interval = " << interval << '\n';
        integrator.run_until(t_end, interval, probes, trace);
        const FieldState final_state = integrator.snapshot();
        write_outputs(&final_state);
        log << "avi run finished: t = " << integrator.time() << ", " << integrator.total_firings() << " firings, "
            << trace.size() << " samples\n";
      } else {
        StepperOptions opts;
        opts.stability_guard = false;  // checked above with a config-level message
        UniformStepper stepper(mesh, hodge_eps, hodge_mu_inv, dt, scenario.sources, scenario.state, opts);
        RecordOptions record;
        record.cadence = c.cadence;
        record.probes = probes;
        run(stepper, steps, record, trace);
        write_outputs(&stepper.state());
        log << "uniform run finished: " << stepper.steps_taken() << " steps, t = " << stepper.state().t_E << ", "
            << trace.size() << " samples\n";
      }
      if (!trace.empty()) {
        const auto& last = trace.row(trace.size() - 1);
        log << std::setprecision(10) << "final energy " << last[0] << ", gauss_max " << last[1] << ", divb_max "
            << last[2] << '\n';
      }
    } catch (const NumericalBlowup& e) {
      derived << "# numerical blowup at step " << e.step() << (e.face() >= 0 ? ", face " + std::to_string(e.face()) : "")
              << '\n';
      write_outputs(nullptr);
      log << e.what() << "\nnumerical blowup at step " << e.step();
      if (e.face() >= 0) log << " (face " << e.face() << ")";
      log << '\n';
      return kExitBlowup;
    }
    return kExitOk;
  } catch (const Error& e) {
    log << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

int cmd_run_file(const std::string& path, const std::string& out_dir_override, const std::string& seed_override,
                 bool print_config, std::ostream& out, std::ostream& log) {
  RunConfig config;
  try {
    config = parse_config_file(path);
    if (!out_dir_override.empty()) config.out_dir = out_dir_override;
    if (!seed_override.empty()) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(seed_override, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != seed_override.size() || seed_override.front() == '-')
        throw Error(ErrorKind::ConfigError, "--seed: expected a non-negative integer, got '" + seed_override + "'");
      config.seed = v;
    }
  } catch (const Error& e) {
    log << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  if (print_config) {
    write_config(out, config);
    return kExitOk;
  }
  return cmd_run(config, log);
}

int cmd_validate_mesh(const std::string& path, std::ostream& out, std::ostream& log) {
  if (!std::filesystem::is_regular_file(path)) {
    log << "no such mesh file '" << path << "'\n";
    return kExitOther;
  }
  try {
    const MeshComplex mesh = read_mesh_file(path);
    const ValidationReport report = validate(mesh);
    out << "mesh: dimension " << mesh.dimension() << ", " << mesh.num_vertices() << " vertices, "
        << mesh.num_edges() << " edges, " << mesh.num_cells(mesh.dimension()) << " top cells\n"
        << report.to_string();
    return report.ok() ? kExitOk : kExitValidation;
  } catch (const Error& e) {
    log << e.what() << '\n';
    return kExitValidation;
  }
}

int cmd_list_scenarios(std::ostream& out) {
  for (const auto& name : scenario_names()) out << name << '\n';
  return kExitOk;
}

}  // namespace emdec
