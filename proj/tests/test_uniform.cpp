#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"
#include "emdec/uniform_integrator.hpp"
#include "oracles/dense.hpp"
#include "support.hpp"

using namespace emdec;

namespace {

struct Setup {
  MeshComplex mesh;
  MaterialField mat;
  DiagonalHodge he, hm;

  explicit Setup(MeshComplex m, double eps = 1.0, double mu = 1.0)
      : mesh(std::move(m)), mat(MaterialField::uniform(mesh, eps, mu)),
        he(build_hodge(mesh, 1, mat, MaterialTag::Epsilon)), hm(build_hodge(mesh, 2, mat, MaterialTag::MuInverse)) {}

  FieldState noise(std::uint64_t seed) const {
    ScenarioParams p;
    p.seed = seed;
    return init_scenario("random-noise", mesh, mat, p).state;
  }
  std::shared_ptr<const SourceModel> zero() const { return std::make_shared<ZeroSource>(mesh); }
};

double rel_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return d / s;
}

}  // namespace

TEST_CASE("matches the 3D Yee stencil") {
  const double hx = 0.2, hy = 0.25, hz = 1.0 / 6.0;
  Setup s(fixtures::rect3(5, 4, 6, hx, hy, hz), 2.0, 0.5);
  oracle::Yee3D yee(5, 4, 6, hx, hy, hz);
  yee.eps = 2.0;
  yee.mu = 0.5;
  const auto map = fixtures::yee_map(s.mesh, yee);
  const FieldState init = s.noise(3);
  map.load(init.E.values(), init.B.values());

  const double dt = 0.5 * cfl_estimate(s.mesh, s.he, s.hm);
  UniformStepper stepper(s.mesh, s.he, s.hm, dt, s.zero(), init);
  yee.faraday(-0.5 * dt);
  for (int n = 0; n < 200; ++n) {
    stepper.step();
    yee.step(dt);
  }
  CHECK(rel_diff(stepper.state().E.values(), map.edge_values()) < 1e-13);
  CHECK(rel_diff(stepper.state().B.values(), map.face_values()) < 1e-13);
}

TEST_CASE("matches the 2D Yee stencil") {
  const double hx = 0.1, hy = 0.125;
  Setup s(fixtures::rect2(10, 8, hx, hy));
  oracle::Yee2D yee(10, 8, hx, hy);
  const auto map = fixtures::yee_map(s.mesh, yee);
  const FieldState init = s.noise(4);
  map.load(init.E.values(), init.B.values());
  const double dt = 0.7 * cfl_estimate(s.mesh, s.he, s.hm);
  UniformStepper stepper(s.mesh, s.he, s.hm, dt, s.zero(), init);
  yee.faraday(-0.5 * dt);
  for (int n = 0; n < 500; ++n) {
    stepper.step();
    yee.step(dt);
  }
  CHECK(rel_diff(stepper.state().E.values(), map.edge_values()) < 1e-13);
  CHECK(rel_diff(stepper.state().B.values(), map.face_values()) < 1e-13);
}

TEST_CASE("matches a dense leapfrog with a driven source") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    Setup s(fixtures::random_jittered(rng));
    const double dt = 0.5 * cfl_estimate(s.mesh, s.he, s.hm);
    ScenarioParams p;
    p.quadrature_dt = dt;
    const Scenario sc = init_scenario("dipole-current", s.mesh, s.mat, p);

    oracle::DenseLeapfrog ref;
    ref.C.assign(s.mesh.num_faces(), std::vector<double>(s.mesh.num_edges(), 0.0));
    const auto& b = s.mesh.boundary(2);
    for (Index f = 0; f < s.mesh.num_faces(); ++f)
      for (Index j = b.offsets[f]; j < b.offsets[f + 1]; ++j) ref.C[f][b.targets[j]] = b.signs[j];
    ref.eps = s.he.entries;
    ref.mu_inv = s.hm.entries;
    ref.boundary.assign(s.mesh.boundary_flags(1).begin(), s.mesh.boundary_flags(1).end());

    UniformStepper stepper(s.mesh, s.he, s.hm, dt, sc.sources, sc.state);
    std::vector<double> E(sc.state.E.values().begin(), sc.state.E.values().end());
    std::vector<double> B(sc.state.B.values().begin(), sc.state.B.values().end());
    std::vector<double> D(E.size()), J(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) D[e] = ref.eps[e] * E[e];
    const auto curl = oracle::matvec(ref.C, E);
    for (std::size_t f = 0; f < B.size(); ++f) B[f] += 0.5 * dt * curl[f];
    for (int n = 0; n < 100; ++n) {
      sc.sources->current((n + 0.5) * dt, J);
      ref.step(dt, E, B, D, J);
      stepper.step();
    }
    CHECK(rel_diff(stepper.state().E.values(), E) < 1e-12);
    CHECK(rel_diff(stepper.D(), D) < 1e-12);
    CHECK(stepper.state().t_E == doctest::Approx(100 * dt));
    CHECK(stepper.state().t_B == doctest::Approx(99.5 * dt));
  }
}

TEST_CASE("time reversal retraces the trajectory") {
  std::mt19937_64 rng(1);
  Setup s(fixtures::random_jittered(rng));
  const FieldState init = s.noise(8);
  UniformStepper stepper(s.mesh, s.he, s.hm, 0.5 * cfl_estimate(s.mesh, s.he, s.hm), s.zero(), init);
  for (int n = 0; n < 300; ++n) stepper.step();
  stepper.reverse_time();
  CHECK(stepper.dt() < 0.0);
  for (int n = 0; n < 300; ++n) stepper.step();
  CHECK(rel_diff(stepper.state().E.values(), init.E.values()) < 1e-11);
  CHECK(std::abs(stepper.state().t_E) < 1e-12);
}

TEST_CASE("run records at the requested cadence") {
  Setup s(fixtures::rect2(6, 6, 1.0 / 6, 1.0 / 6));
  const FieldState init = init_scenario("cavity-mode", s.mesh, s.mat).state;
  const double dt = 0.5 * cfl_estimate(s.mesh, s.he, s.hm);
  {
    UniformStepper st(s.mesh, s.he, s.hm, dt, s.zero(), init);
    RecordOptions rec;
    rec.cadence = 10;
    rec.probes.push_back(edge_probe("E7", nearest_interior_edge(s.mesh, {0.5, 0.5, 0})));
    const Trace t = run(st, 100, rec);
    CHECK(t.size() == 11);
    CHECK(t.columns().size() == 4);
    CHECK(t.columns().back() == "E7");
    CHECK(t.times()[0] == 0.0);
    CHECK(t.times()[10] == doctest::Approx(100 * dt));
    const auto e = t.column("energy");
    for (double v : e) CHECK(v == doctest::Approx(e[0]).epsilon(1e-13));
  }
  {
    UniformStepper st(s.mesh, s.he, s.hm, dt, s.zero(), init);
    CHECK(run(st, 0).empty());
    RecordOptions rec;
    rec.cadence = 7;
    CHECK(run(st, 20, rec).size() == 3);
    rec.cadence = 0;
    CHECK(run(st, 5, rec).empty());
    CHECK(st.steps_taken() == 25);
    CHECK_THROWS_AS(run(st, -1), Error);
  }
}

TEST_CASE("stability bound on a rect grid") {
  const int nx = 12, ny = 9;
  const double hx = 0.1, hy = 0.15;
  Setup s(fixtures::rect2(nx, ny, hx, hy));
  const double lambda = 4.0 / (hx * hx) * std::pow(std::sin((nx - 1) * std::numbers::pi / (2 * nx)), 2) +
                        4.0 / (hy * hy) * std::pow(std::sin((ny - 1) * std::numbers::pi / (2 * ny)), 2);
  CHECK(cfl_estimate(s.mesh, s.he, s.hm) == doctest::Approx(2.0 / std::sqrt(lambda)).epsilon(1e-4));

  CflOptions tight;
  tight.max_iters = 3;
  tight.check_every = 1;
  tight.tolerance = 1e-15;
  try {
    cfl_estimate(s.mesh, s.he, s.hm, tight);
    FAIL("expected EstimateFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EstimateFailed);
  }
}

TEST_CASE("stability guard and argument checks") {
  Setup s(fixtures::rect2(8, 8, 0.125, 0.125));
  const FieldState init = s.noise(1);
  const double cfl = cfl_estimate(s.mesh, s.he, s.hm);
  try {
    UniformStepper st(s.mesh, s.he, s.hm, 0.96 * cfl, s.zero(), init);
    FAIL("expected the guard to reject dt");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  UniformStepper ok(s.mesh, s.he, s.hm, 0.94 * cfl, s.zero(), init);
  CHECK(ok.cfl_bound() == doctest::Approx(cfl));

  StepperOptions off;
  off.stability_guard = false;
  UniformStepper wild(s.mesh, s.he, s.hm, 1.5 * cfl, s.zero(), init, off);
  CHECK(wild.cfl_bound() == 0.0);
  Trace partial = conservation_trace({});
  try {
    run(wild, 5000, {}, partial);
    FAIL("expected a blowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() < 5000);
    CHECK(partial.size() >= 1);
  }

  CHECK_THROWS_AS(UniformStepper(s.mesh, s.he, s.hm, 0.0, s.zero(), init), Error);
  FieldState stag = init;
  stag.t_B = -0.3;
  try {
    UniformStepper st(s.mesh, s.he, s.hm, 0.01, s.zero(), stag);
    FAIL("expected StaggerError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StaggerError);
  }
  stag.t_B = -0.005;
  CHECK_NOTHROW(UniformStepper(s.mesh, s.he, s.hm, 0.01, s.zero(), stag));
  FieldState dirty = init;
  for (Index e = 0; e < s.mesh.num_edges(); ++e)
    if (s.mesh.on_boundary(1, e)) dirty.E[e] = 1.0;
  CHECK_THROWS_AS(UniformStepper(s.mesh, s.he, s.hm, 0.01, s.zero(), dirty), Error);
}

TEST_CASE("results do not depend on the thread count") {
  Setup s(fixtures::rect3(6, 6, 6, 1, 1, 1));
  const FieldState init = s.noise(12);
  const double dt = 0.4 * cfl_estimate(s.mesh, s.he, s.hm);
  std::vector<std::vector<double>> results;
  for (int threads : {1, 3}) {
    kernels::set_threads(threads);
    UniformStepper st(s.mesh, s.he, s.hm, dt, s.zero(), init);
    const Trace t = run(st, 50);
    results.push_back({st.state().E.values().begin(), st.state().E.values().end()});
    results.back().push_back(t.column("energy").back());
  }
  kernels::set_threads(0);
  CHECK(results[0] == results[1]);
}
