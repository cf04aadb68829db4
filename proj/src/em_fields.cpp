#include "emdec/em_fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"

namespace emdec {

bool satisfies_pec(const FieldState& state) {
  const MeshComplex& mesh = state.mesh();
  for (Index e = 0; e < mesh.num_edges(); ++e)
    if (mesh.on_boundary(1, e) && state.E[e] != 0.0) return false;
  return true;
}

double SourceModel::current_at(double t, Index edge) const {
  std::vector<double> J(mesh().num_edges());
  current(t, J);
  return J[edge];
}

void ZeroSource::current(double, std::span<double> J) const { std::fill(J.begin(), J.end(), 0.0); }
void ZeroSource::charge(double, std::span<double> rho) const { std::fill(rho.begin(), rho.end(), 0.0); }

namespace {

// Tail and head vertex of an edge from its boundary signs.
std::pair<Index, Index> edge_ends(const MeshComplex& mesh, Index e) {
  const auto ts = mesh.boundary(1).row_targets(e);
  const auto ss = mesh.boundary(1).row_signs(e);
  return ss[0] > 0 ? std::pair{ts[1], ts[0]} : std::pair{ts[0], ts[1]};
}

}  // namespace

DipoleSource::DipoleSource(const MeshComplex& mesh, Index edge, double q, double omega, double quadrature_dt,
                           double charge_scale)
    : SourceModel(mesh), edge_(edge), q_(q), omega_(omega), charge_scale_(charge_scale) {
  if (edge < 0 || edge >= mesh.num_edges()) throw Error(ErrorKind::InvalidArgument, "dipole edge out of range");
  if (quadrature_dt < 0.0) throw Error(ErrorKind::InvalidArgument, "quadrature step must be >= 0");
  std::tie(tail_, head_) = edge_ends(mesh, edge);
  omega_eff_ = quadrature_dt > 0.0 ? 2.0 / quadrature_dt * std::sin(0.5 * omega * quadrature_dt) : omega;
}

void DipoleSource::current(double t, std::span<double> J) const {
  std::fill(J.begin(), J.end(), 0.0);
  J[edge_] = q_ * omega_eff_ * std::cos(omega_ * t);
}

double DipoleSource::current_at(double t, Index edge) const {
  return edge == edge_ ? q_ * omega_eff_ * std::cos(omega_ * t) : 0.0;
}

void DipoleSource::charge(double t, std::span<double> rho) const {
  std::fill(rho.begin(), rho.end(), 0.0);
  const double s = charge_scale_ * q_ * std::sin(omega_ * t);
  rho[tail_] = s;
  rho[head_] = -s;
}

std::string DipoleSource::describe() const {
  std::ostringstream os;
  os << "dipole(edge=" << edge_ << ", q=" << q_ << ", omega=" << omega_ << ")";
  return os.str();
}

FunctionSource::FunctionSource(const MeshComplex& mesh, Fill current, Fill charge, std::string name)
    : SourceModel(mesh), current_(std::move(current)), charge_(std::move(charge)), name_(std::move(name)) {}

// ---------------------------------------------------------------------------

Cochain gauss_residual(const MeshComplex& mesh, std::span<const double> D, const SourceModel& sources,
                       double t) {
  const int n = mesh.dimension();
  Cochain div(mesh, n, Side::Dual);
  kernels::incidence_apply(mesh.cofaces(0), D, div.values());
  std::vector<double> rho(mesh.num_vertices());
  sources.charge(t, rho);
  for (Index v = 0; v < div.size(); ++v) div[v] -= rho[v];
  return div;
}

Cochain gauss_residual(const FieldState& state, const DiagonalHodge& hodge_eps, const SourceModel& sources) {
  const Cochain D = apply_hodge(hodge_eps, state.E);
  return gauss_residual(state.mesh(), D.values(), sources, state.t_E);
}

double max_abs_interior(const Cochain& vertex_values) {
  const MeshComplex& mesh = vertex_values.mesh();
  double m = 0.0;
  for (Index v = 0; v < vertex_values.size(); ++v)
    if (!mesh.on_boundary(0, v)) m = std::max(m, std::abs(vertex_values[v]));
  return m;
}

Cochain div_b_residual(const FieldState& state) {
  if (state.mesh().dimension() != 3)
    throw Error(ErrorKind::Unsupported, "div B residual is vacuous in 2D (no 3-cells)");
  return coboundary(state.B);
}

std::string ContinuityReport::to_string() const {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "continuity " << (passed ? "passed" : "FAILED") << ": max residual " << max_residual << ", tolerance "
     << tolerance << " (charge scale " << charge_scale << ")\n";
  const std::size_t shown = std::min<std::size_t>(offending.size(), 20);
  for (std::size_t i = 0; i < shown; ++i)
    os << "  vertex " << offending[i] << " residual " << per_vertex[offending[i]] << '\n';
  if (offending.size() > shown) os << "  ... " << offending.size() - shown << " more\n";
  return os.str();
}

ContinuityReport validate_continuity(const SourceModel& source, const MeshComplex& mesh, double t0, double t1,
                                     double dt_sample, double tolerance) {
  if (!(t0 < t1)) throw Error(ErrorKind::InvalidArgument, "continuity window needs t0 < t1");
  if (!(dt_sample > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt_sample must be positive");
  const Index nv = mesh.num_vertices();
  const auto steps = static_cast<std::int64_t>(std::ceil((t1 - t0) / dt_sample * (1.0 - 1e-12)));
  const double h = (t1 - t0) / static_cast<double>(std::max<std::int64_t>(steps, 1));

  std::vector<double> rho0(nv), rho(nv), J(mesh.num_edges()), divJ(nv), integral(nv, 0.0);
  source.charge(t0, rho0);
  ContinuityReport report;
  report.per_vertex.assign(nv, 0.0);
  double scale = 0.0;
  for (double r : rho0) scale = std::max(scale, std::abs(r));

  for (std::int64_t i = 0; i < std::max<std::int64_t>(steps, 1); ++i) {
    const double ta = t0 + static_cast<double>(i) * h;
    const double tb = i + 1 == steps ? t1 : t0 + static_cast<double>(i + 1) * h;
    source.current(0.5 * (ta + tb), J);
    kernels::incidence_apply(mesh.cofaces(0), J, divJ);
    source.charge(tb, rho);
    for (Index v = 0; v < nv; ++v) {
      integral[v] += (tb - ta) * divJ[v];
      const double r = std::abs(rho[v] - rho0[v] + integral[v]);
      report.per_vertex[v] = std::max(report.per_vertex[v], r);
      scale = std::max(scale, std::abs(rho[v]));
    }
  }
  report.charge_scale = scale;
  report.tolerance = tolerance * scale;
  for (Index v = 0; v < nv; ++v) {
    report.max_residual = std::max(report.max_residual, report.per_vertex[v]);
    if (report.per_vertex[v] > report.tolerance) report.offending.push_back(v);
  }
  report.passed = report.offending.empty();
  return report;
}

// ---------------------------------------------------------------------------

namespace {

struct Box {
  Point lo{}, hi{};
};

Box bounding_box(const MeshComplex& mesh) {
  Box b;
  const auto verts = mesh.vertices();
  b.lo = b.hi = verts[0];
  for (const Point& p : verts)
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], p[a]);
      b.hi[a] = std::max(b.hi[a], p[a]);
    }
  return b;
}

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGaussNodes{0.046910077030668004, 0.23076534494715845, 0.5,
                                            0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGaussWeights{0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                              0.23931433524968324, 0.11846344252809454};

struct CavityMode {
  int dim = 2;
  Point origin{};
  double kx = 0, ky = 0, kz = 0, amp = 1, omega = 0;

  Point field(const Point& p) const {
    const double x = p[0] - origin[0], y = p[1] - origin[1], z = p[2] - origin[2];
    const double kxy = std::hypot(kx, ky);
    const double zf = dim == 3 ? std::sin(kz * z) : 1.0;
    return {amp * ky / kxy * std::cos(kx * x) * std::sin(ky * y) * zf,
            -amp * kx / kxy * std::sin(kx * x) * std::cos(ky * y) * zf, 0.0};
  }
};

CavityMode make_cavity(const MeshComplex& mesh, const std::vector<int>& modes, double amplitude) {
  const int n = mesh.dimension();
  if (static_cast<int>(modes.size()) < n)
    throw Error(ErrorKind::InvalidArgument, "cavity-mode needs " + std::to_string(n) + " mode indices");
  for (int a = 0; a < n; ++a)
    if (modes[a] < 0) throw Error(ErrorKind::InvalidArgument, "cavity mode indices must be >= 0");
  if (modes[0] == 0 && modes[1] == 0)
    throw Error(ErrorKind::InvalidArgument, "cavity mode needs m or n nonzero");
  if (n == 3 && modes[2] == 0) throw Error(ErrorKind::InvalidArgument, "3D cavity mode needs p >= 1");
  const Box box = bounding_box(mesh);
  CavityMode c;
  c.dim = n;
  c.origin = box.lo;
  c.amp = amplitude;
  const double pi = std::numbers::pi;
  c.kx = modes[0] * pi / (box.hi[0] - box.lo[0]);
  c.ky = modes[1] * pi / (box.hi[1] - box.lo[1]);
  c.kz = n == 3 ? modes[2] * pi / (box.hi[2] - box.lo[2]) : 0.0;
  c.omega = std::sqrt(c.kx * c.kx + c.ky * c.ky + c.kz * c.kz);
  return c;
}

}  // namespace

double cavity_omega(const MeshComplex& mesh, const std::vector<int>& modes) {
  return make_cavity(mesh, modes, 1.0).omega;
}

Index nearest_interior_edge(const MeshComplex& mesh, const Point& p) {
  Index best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.on_boundary(1, e)) continue;
    const Point& c = mesh.circumcenter(1, e);
    const double d = (c[0] - p[0]) * (c[0] - p[0]) + (c[1] - p[1]) * (c[1] - p[1]) + (c[2] - p[2]) * (c[2] - p[2]);
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  if (best < 0) throw Error(ErrorKind::InvalidArgument, "mesh has no interior edge");
  return best;
}

std::vector<std::string> scenario_names() {
  return {"cavity-mode", "dipole-current", "random-noise", "vacuum-zero"};
}

Scenario init_scenario(const std::string& name, const MeshComplex& mesh, const MaterialField& materials,
                       const ScenarioParams& params) {
  if (materials.epsilon.size() != static_cast<std::size_t>(mesh.num_edges()) ||
      materials.mu.size() != static_cast<std::size_t>(mesh.num_faces()))
    throw Error(ErrorKind::InvalidArgument, "materials do not match the mesh");
  Scenario s{FieldState(mesh), std::make_shared<ZeroSource>(mesh), 0.0};

  if (name == "vacuum-zero") return s;

  if (name == "cavity-mode") {
    const CavityMode mode = make_cavity(mesh, params.modes, params.amplitude);
    s.omega = mode.omega;
    const auto verts = mesh.vertices();
    for (Index e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.on_boundary(1, e)) continue;
      const auto [tail, head] = edge_ends(mesh, e);
      const Point& a = verts[tail];
      const Point& b = verts[head];
      const Point d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      double sum = 0.0;
      for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
        const double u = kGaussNodes[q];
        const Point f = mode.field({a[0] + u * d[0], a[1] + u * d[1], a[2] + u * d[2]});
        sum += kGaussWeights[q] * (f[0] * d[0] + f[1] * d[1] + f[2] * d[2]);
      }
      s.state.E[e] = sum;
    }
    return s;
  }

  if (name == "random-noise") {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Index e = 0; e < mesh.num_edges(); ++e) {
      const double v = params.amplitude * unit(rng);
      if (!mesh.on_boundary(1, e)) s.state.E[e] = v;
    }
    for (Index f = 0; f < mesh.num_faces(); ++f) s.state.B[f] = params.amplitude * unit(rng);
    return s;
  }

  if (name == "dipole-current") {
    Index edge = params.dipole_edge;
    if (edge < 0) {
      const Box box = bounding_box(mesh);
      edge = nearest_interior_edge(mesh, {0.5 * (box.lo[0] + box.hi[0]), 0.5 * (box.lo[1] + box.hi[1]),
                                          0.5 * (box.lo[2] + box.hi[2])});
    }
    if (mesh.on_boundary(1, edge)) throw Error(ErrorKind::InvalidArgument, "dipole edge lies on the boundary");
    s.sources = std::make_shared<DipoleSource>(mesh, edge, params.charge, params.omega, params.quadrature_dt,
                                               params.charge_scale);
    s.omega = params.omega;
    return s;
  }

  throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + name + "'");
}

// ---------------------------------------------------------------------------

void write_fields(std::ostream& out, const FieldState& state) {
  out << std::setprecision(17);
  out << "dec-fields t_E=" << state.t_E << " t_B=" << state.t_B << '\n';
  for (Index e = 0; e < state.E.size(); ++e) out << "E " << e << ' ' << state.E[e] << '\n';
  for (Index f = 0; f < state.B.size(); ++f) out << "B " << f << ' ' << state.B[f] << '\n';
}

void write_fields_file(const std::string& path, const FieldState& state) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  write_fields(out, state);
}

FieldState read_fields(std::istream& in, const MeshComplex& mesh) {
  FieldState state(mesh);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty field dump");
  std::istringstream hs(line);
  std::string tag, te, tb;
  if (!(hs >> tag >> te >> tb) || tag != "dec-fields" || te.rfind("t_E=", 0) != 0 || tb.rfind("t_B=", 0) != 0)
    throw Error(ErrorKind::IoError, "line 1: expected 'dec-fields t_E=<t> t_B=<t>'");
  state.t_E = std::stod(te.substr(4));
  state.t_B = std::stod(tb.substr(4));
  int line_no = 1;
  std::vector<std::uint8_t> seen_e(mesh.num_edges(), 0), seen_b(mesh.num_faces(), 0);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    long long idx = -1;
    double v = 0.0;
    if (!(ls >> kind >> idx >> v)) throw Error(ErrorKind::IoError, "line " + std::to_string(line_no) + ": malformed");
    if (kind == "E" && idx >= 0 && idx < state.E.size()) {
      state.E[static_cast<Index>(idx)] = v;
      seen_e[idx] = 1;
    } else if (kind == "B" && idx >= 0 && idx < state.B.size()) {
      state.B[static_cast<Index>(idx)] = v;
      seen_b[idx] = 1;
    } else {
      throw Error(ErrorKind::IoError, "line " + std::to_string(line_no) + ": bad entry");
    }
  }
  if (std::count(seen_e.begin(), seen_e.end(), 0) || std::count(seen_b.begin(), seen_b.end(), 0))
    throw Error(ErrorKind::IoError, "field dump does not cover every edge and face");
  return state;
}

}  // namespace emdec
