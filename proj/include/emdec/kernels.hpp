#pragma once

// Data-parallel loops behind the cochain operators and the leapfrog update.
//
// emdec::kernels holds the OpenMP versions; emdec::kernels::ref the serial
// reference versions used by the tests and the benchmark. Every output entry
// is written by exactly one iteration and its arithmetic is done in a fixed
// order, so both versions agree bitwise for any thread count.

#include <cstdint>
#include <span>

#include "emdec/mesh.hpp"

namespace emdec::kernels {

/// y[r] = sum_j sign(r,j) * x[target(r,j)]
void incidence_apply(const Incidence& inc, std::span<const double> x, std::span<double> y);

/// y[i] = w[i] * x[i]
void diagonal_scale(std::span<const double> w, std::span<const double> x, std::span<double> y);

/// B[f] -= sum_{e in df} sign * (dt * E[e])
void faraday_update(const Incidence& face_edges, std::span<const double> E, double dt,
                    std::span<double> B);

/// For every edge with boundary[e] == 0:
///   D[e] = D[e] + sum_{f > e} sign * (dt * (mu_inv[f] * B[f]))  [ - dt * J[e] ]
///   E[e] = D[e] / eps[e]
/// J may be empty (no source).
void ampere_update(const Incidence& edge_faces, std::span<const double> B,
                   std::span<const double> mu_inv, std::span<const double> J,
                   std::span<const std::uint8_t> boundary, std::span<const double> eps, double dt,
                   std::span<double> D, std::span<double> E);

/// Blocked dot product. Block partial sums are combined in block order, so
/// the result does not depend on the thread count.
double dot(std::span<const double> x, std::span<const double> y);

bool all_finite(std::span<const double> x);

/// Threads used by the OpenMP kernels (1 when built without OpenMP).
int max_threads();
/// 0 restores the runtime default.
void set_threads(int n);

}  // namespace emdec::kernels

namespace emdec::kernels::ref {

void incidence_apply(const Incidence& inc, std::span<const double> x, std::span<double> y);
void diagonal_scale(std::span<const double> w, std::span<const double> x, std::span<double> y);
void faraday_update(const Incidence& face_edges, std::span<const double> E, double dt,
                    std::span<double> B);
void ampere_update(const Incidence& edge_faces, std::span<const double> B,
                   std::span<const double> mu_inv, std::span<const double> J,
                   std::span<const std::uint8_t> boundary, std::span<const double> eps, double dt,
                   std::span<double> D, std::span<double> E);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace emdec::kernels::ref
