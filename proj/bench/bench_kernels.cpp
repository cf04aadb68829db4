// OpenMP kernels against the serial reference on a 3D grid and a jittered
// triangulation. The argument is the grid size per axis.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emdec/avi.hpp"
#include "emdec/kernels.hpp"
#include "emdec/uniform_integrator.hpp"
#include "support.hpp"

using namespace emdec;

namespace {

struct Fixture {
  MeshComplex mesh;
  std::vector<double> E, B, D, eps, mu_inv;

  explicit Fixture(MeshComplex m) : mesh(std::move(m)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
      v.resize(n);
      for (double& x : v) x = u(rng);
    };
    fill(E, mesh.num_edges());
    fill(B, mesh.num_faces());
    fill(D, mesh.num_edges());
    eps.assign(mesh.num_edges(), 1.5);
    mu_inv.assign(mesh.num_faces(), 0.75);
  }
};

const Fixture& cube(int n) {
  static std::vector<std::pair<int, Fixture>> cache;
  for (auto& [k, f] : cache)
    if (k == n) return f;
  cache.emplace_back(n, Fixture(fixtures::rect3(n, n, n, 1.0 / n, 1.0 / n, 1.0 / n)));
  return cache.back().second;
}

template <bool Ref>
void BM_Faraday(benchmark::State& state) {
  const Fixture& f = cube(static_cast<int>(state.range(0)));
  std::vector<double> B = f.B;
  for (auto _ : state) {
    if constexpr (Ref) kernels::ref::faraday_update(f.mesh.boundary(2), f.E, 1e-3, B);
    else kernels::faraday_update(f.mesh.boundary(2), f.E, 1e-3, B);
    benchmark::DoNotOptimize(B.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_faces());
}

template <bool Ref>
void BM_Ampere(benchmark::State& state) {
  const Fixture& f = cube(static_cast<int>(state.range(0)));
  std::vector<double> D = f.D, E = f.E;
  for (auto _ : state) {
    if constexpr (Ref)
      kernels::ref::ampere_update(f.mesh.cofaces(1), f.B, f.mu_inv, {}, f.mesh.boundary_flags(1), f.eps, 1e-3, D, E);
    else
      kernels::ampere_update(f.mesh.cofaces(1), f.B, f.mu_inv, {}, f.mesh.boundary_flags(1), f.eps, 1e-3, D, E);
    benchmark::DoNotOptimize(E.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_edges());
}

template <bool Ref>
void BM_Dot(benchmark::State& state) {
  const Fixture& f = cube(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double d = Ref ? kernels::ref::dot(f.E, f.D) : kernels::dot(f.E, f.D);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_edges());
}

void BM_UniformStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MeshComplex mesh = fixtures::rect3(n, n, n, 1.0 / n, 1.0 / n, 1.0 / n);
  const auto mat = MaterialField::uniform(mesh);
  const auto he = build_hodge(mesh, 1, mat, MaterialTag::Epsilon);
  const auto hm = build_hodge(mesh, 2, mat, MaterialTag::MuInverse);
  const Scenario sc = init_scenario("cavity-mode", mesh, mat, {.modes = {1, 1, 1}});
  StepperOptions opts;
  opts.stability_guard = false;
  UniformStepper st(mesh, he, hm, 0.3 / n, sc.sources, sc.state, opts);
  for (auto _ : state) st.step();
  state.SetItemsProcessed(state.iterations() * mesh.num_edges());
}

void BM_AviFiring(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MeshComplex mesh = generate_jittered_triangulation({n, n}, {1.0 / n, 1.0 / n}, 0.15, 3);
  const auto mat = MaterialField::uniform(mesh);
  const auto he = build_hodge(mesh, 1, mat, MaterialTag::Epsilon);
  const auto hm = build_hodge(mesh, 2, mat, MaterialTag::MuInverse);
  const Scenario sc = init_scenario("cavity-mode", mesh, mat);
  const auto dt = assign_steps(mesh, he, hm, StepPolicy::random(3, 0.1, 0.2, true));
  AsyncIntegrator avi(mesh, he, hm, dt, sc.sources, sc.state);
  for (auto _ : state) avi.step();
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_Faraday<true>)->Name("faraday/ref")->Arg(16)->Arg(48);
BENCHMARK(BM_Faraday<false>)->Name("faraday/omp")->Arg(16)->Arg(48);
BENCHMARK(BM_Ampere<true>)->Name("ampere/ref")->Arg(16)->Arg(48);
BENCHMARK(BM_Ampere<false>)->Name("ampere/omp")->Arg(16)->Arg(48);
BENCHMARK(BM_Dot<true>)->Name("dot/ref")->Arg(16)->Arg(48);
BENCHMARK(BM_Dot<false>)->Name("dot/omp")->Arg(16)->Arg(48);
BENCHMARK(BM_UniformStep)->Name("uniform_step")->Arg(16)->Arg(32);
BENCHMARK(BM_AviFiring)->Name("avi_firing")->Arg(16)->Arg(64);

BENCHMARK_MAIN();
