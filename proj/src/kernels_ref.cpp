#include <algorithm>

#include "emdec/kernels.hpp"

namespace emdec::kernels::ref {

void incidence_apply(const Incidence& inc, std::span<const double> x, std::span<double> y) {
  const Index rows = inc.rows();
  for (Index r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (Index j = inc.offsets[r]; j < inc.offsets[r + 1]; ++j) acc += inc.signs[j] * x[inc.targets[j]];
    y[r] = acc;
  }
}

void diagonal_scale(std::span<const double> w, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = w[i] * x[i];
}

void faraday_update(const Incidence& face_edges, std::span<const double> E, double dt,
                    std::span<double> B) {
  const Index rows = face_edges.rows();
  for (Index f = 0; f < rows; ++f) {
    double acc = 0.0;
    for (Index j = face_edges.offsets[f]; j < face_edges.offsets[f + 1]; ++j)
      acc += face_edges.signs[j] * (dt * E[face_edges.targets[j]]);
    B[f] -= acc;
  }
}

void ampere_update(const Incidence& edge_faces, std::span<const double> B,
                   std::span<const double> mu_inv, std::span<const double> J,
                   std::span<const std::uint8_t> boundary, std::span<const double> eps, double dt,
                   std::span<double> D, std::span<double> E) {
  const Index rows = edge_faces.rows();
  const bool source = !J.empty();
  for (Index e = 0; e < rows; ++e) {
    if (boundary[e]) continue;
    double d = D[e];
    for (Index j = edge_faces.offsets[e]; j < edge_faces.offsets[e + 1]; ++j) {
      const Index f = edge_faces.targets[j];
      d = d + edge_faces.signs[j] * (dt * (mu_inv[f] * B[f]));
    }
    if (source) d = d - dt * J[e];
    D[e] = d;
    E[e] = d / eps[e];
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  constexpr std::size_t kBlock = 4096;
  double total = 0.0;
  for (std::size_t start = 0; start < x.size(); start += kBlock) {
    const std::size_t end = std::min(x.size(), start + kBlock);
    double partial = 0.0;
    for (std::size_t i = start; i < end; ++i) partial += x[i] * y[i];
    total += partial;
  }
  return total;
}

}  // namespace emdec::kernels::ref
