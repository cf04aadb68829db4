#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emdec/dec.hpp"
#include "emdec/em_fields.hpp"

namespace emdec {

/// Time series with named scalar columns. Times strictly increase and all
/// values are finite.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void append(double t, std::vector<double> values);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  std::span<const double> times() const { return times_; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  /// Header `t,<columns>`, 17 significant digits, LF line endings.
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<double> times_;
  std::vector<std::vector<double>> rows_;
};

/// Column names written by record_conservation.
inline const std::vector<std::string> kConservationColumns{"energy", "gauss_max", "divb_max"};

/// Time-centred discrete energy
///   1/2 <E, *eps E> + 1/2 <B-, *mu_inv B+>
/// where B- is the stored B (half a step behind E) and B+ = B- - dt dE with
/// dt = 2 (t_E - t_B). A synchronous state uses B- = B+ = B. A state whose
/// B is ahead of E throws StaggerError.
double energy(const FieldState& state, const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv);

/// Quadratic form shared by the uniform and asynchronous integrators.
/// Boundary edges are skipped.
double energy_from_parts(const MeshComplex& mesh, std::span<const double> E, std::span<const double> B_minus,
                         std::span<const double> B_plus, const DiagonalHodge& hodge_eps,
                         const DiagonalHodge& hodge_mu_inv);

/// (energy, max interior |gauss residual|, max |div B|) for a state; div B is
/// reported as 0 in 2D.
std::vector<double> conservation_values(const FieldState& state, const SourceModel& sources,
                                        const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv);

/// Appends (t, energy, gauss_max, divb_max, extra...) to the trace.
void record_conservation(Trace& trace, const FieldState& state, const SourceModel& sources,
                         const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv, double t,
                         std::span<const double> extra = {});

struct Tone {
  double omega = 0.0;
  double amplitude = 0.0;
};

/// Strongest spectral peak of a uniformly sampled signal (>= 64 samples):
/// Hann window, zero-padded FFT, parabolic interpolation on log magnitude,
/// then golden-section refinement of the windowed transform.
Tone dominant_frequency(std::span<const double> times, std::span<const double> values);
Tone dominant_frequency(const Trace& trace, const std::string& column);

/// Least-squares slope of log(error) against log(h).
double convergence_order(std::span<const std::pair<double, double>> pairs);

/// Least-squares slope of y against t.
double linear_trend(std::span<const double> t, std::span<const double> y);

}  // namespace emdec
