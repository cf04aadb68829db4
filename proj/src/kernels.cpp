#include "emdec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace emdec::kernels {

namespace {
constexpr std::size_t kDotBlock = 4096;
}

void incidence_apply(const Incidence& inc, std::span<const double> x, std::span<double> y) {
  const Index rows = inc.rows();
  const Index* off = inc.offsets.data();
  const Index* tgt = inc.targets.data();
  const std::int8_t* sgn = inc.signs.data();
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (Index j = off[r]; j < off[r + 1]; ++j) acc += sgn[j] * x[tgt[j]];
    y[r] = acc;
  }
}

void diagonal_scale(std::span<const double> w, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = w[i] * x[i];
}

void faraday_update(const Incidence& face_edges, std::span<const double> E, double dt,
                    std::span<double> B) {
  const Index rows = face_edges.rows();
  const Index* off = face_edges.offsets.data();
  const Index* tgt = face_edges.targets.data();
  const std::int8_t* sgn = face_edges.signs.data();
#pragma omp parallel for schedule(static)
  for (Index f = 0; f < rows; ++f) {
    double acc = 0.0;
    for (Index j = off[f]; j < off[f + 1]; ++j) acc += sgn[j] * (dt * E[tgt[j]]);
    B[f] -= acc;
  }
}

void ampere_update(const Incidence& edge_faces, std::span<const double> B,
                   std::span<const double> mu_inv, std::span<const double> J,
                   std::span<const std::uint8_t> boundary, std::span<const double> eps, double dt,
                   std::span<double> D, std::span<double> E) {
  const Index rows = edge_faces.rows();
  const Index* off = edge_faces.offsets.data();
  const Index* tgt = edge_faces.targets.data();
  const std::int8_t* sgn = edge_faces.signs.data();
  const bool source = !J.empty();
#pragma omp parallel for schedule(static)
  for (Index e = 0; e < rows; ++e) {
    if (boundary[e]) continue;
    double d = D[e];
    for (Index j = off[e]; j < off[e + 1]; ++j) {
      const Index f = tgt[j];
      d = d + sgn[j] * (dt * (mu_inv[f] * B[f]));
    }
    if (source) d = d - dt * J[e];
    D[e] = d;
    E[e] = d / eps[e];
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((x.size() + kDotBlock - 1) / kDotBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t start = static_cast<std::size_t>(b) * kDotBlock;
    const std::size_t end = std::min(x.size(), start + kDotBlock);
    double s = 0.0;
    for (std::size_t i = start; i < end; ++i) s += x[i] * y[i];
    partial[b] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

bool all_finite(std::span<const double> x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) bad |= std::isfinite(x[i]) ? 0 : 1;
  return bad == 0;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
#else
  (void)n;
#endif
}

}  // namespace emdec::kernels
