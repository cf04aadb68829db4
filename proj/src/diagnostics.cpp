#include "emdec/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "emdec/error.hpp"
#include "emdec/kernels.hpp"

namespace emdec {

void Trace::append(double t, std::vector<double> values) {
  if (values.size() != columns_.size())
    throw Error(ErrorKind::InvalidArgument, "trace row has " + std::to_string(values.size()) + " values, expected " +
                                                std::to_string(columns_.size()));
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "trace time is not finite");
  if (!times_.empty() && !(t > times_.back()))
    throw Error(ErrorKind::InvalidArgument, "trace times must increase strictly");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "trace value is not finite");
  times_.push_back(t);
  rows_.push_back(std::move(values));
}

std::size_t Trace::column_index(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw Error(ErrorKind::InvalidArgument, "no trace column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> Trace::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

void Trace::write_csv(std::ostream& out) const {
  out << "t";
  for (const auto& c : columns_) out << ',' << c;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out << times_[i];
    for (double v : rows_[i]) out << ',' << v;
    out << '\n';
  }
}

void Trace::write_csv_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  write_csv(out);
}

// ---------------------------------------------------------------------------

double energy_from_parts(const MeshComplex& mesh, std::span<const double> E, std::span<const double> B_minus,
                         std::span<const double> B_plus, const DiagonalHodge& hodge_eps,
                         const DiagonalHodge& hodge_mu_inv) {
  double electric = 0.0;
  for (Index e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.on_boundary(1, e)) electric += E[e] * (hodge_eps.entries[e] * E[e]);
  double magnetic = 0.0;
  for (Index f = 0; f < mesh.num_faces(); ++f) magnetic += B_minus[f] * (hodge_mu_inv.entries[f] * B_plus[f]);
  return 0.5 * electric + 0.5 * magnetic;
}

double energy(const FieldState& state, const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv) {
  const MeshComplex& mesh = state.mesh();
  if (state.synchronous())
    return energy_from_parts(mesh, state.E.values(), state.B.values(), state.B.values(), hodge_eps, hodge_mu_inv);
  const double dt = 2.0 * (state.t_E - state.t_B);
  if (!(dt > 0.0)) throw Error(ErrorKind::StaggerError, "energy needs B half a step behind E (t_B < t_E)");
  std::vector<double> b_plus(state.B.values().begin(), state.B.values().end());
  kernels::faraday_update(mesh.boundary(2), state.E.values(), dt, b_plus);
  return energy_from_parts(mesh, state.E.values(), state.B.values(), b_plus, hodge_eps, hodge_mu_inv);
}

std::vector<double> conservation_values(const FieldState& state, const SourceModel& sources,
                                        const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv) {
  const double w = energy(state, hodge_eps, hodge_mu_inv);
  const double gauss = max_abs_interior(gauss_residual(state, hodge_eps, sources));
  double divb = 0.0;
  if (state.mesh().dimension() == 3) {
    const Cochain r = div_b_residual(state);
    for (double v : r.values()) divb = std::max(divb, std::abs(v));
  }
  return {w, gauss, divb};
}

void record_conservation(Trace& trace, const FieldState& state, const SourceModel& sources,
                         const DiagonalHodge& hodge_eps, const DiagonalHodge& hodge_mu_inv, double t,
                         std::span<const double> extra) {
  std::vector<double> row = conservation_values(state, sources, hodge_eps, hodge_mu_inv);
  row.insert(row.end(), extra.begin(), extra.end());
  trace.append(t, std::move(row));
}

// ---------------------------------------------------------------------------

namespace {

// |sum_k w_k x_k exp(-i omega t_k)| for the windowed signal.
double windowed_magnitude(std::span<const double> x, double dt, double omega) {
  std::complex<double> acc = 0.0;
  const std::complex<double> step = std::polar(1.0, -omega * dt);
  std::complex<double> phase = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += x[k] * phase;
    phase *= step;
    if ((k & 1023) == 1023) phase = std::polar(1.0, -omega * dt * static_cast<double>(k + 1));
  }
  return std::abs(acc);
}

}  // namespace

Tone dominant_frequency(std::span<const double> times, std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 64) throw Error(ErrorKind::InvalidArgument, "dominant_frequency needs at least 64 samples");
  if (times.size() != n) throw Error(ErrorKind::InvalidArgument, "times and values differ in length");
  const double dt = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample times must increase");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt)
      throw Error(ErrorKind::InvalidArgument, "samples are not uniformly spaced");

  const double pi = std::numbers::pi;
  std::vector<double> windowed(n);
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(k) / static_cast<double>(n - 1));
    windowed[k] = w * values[k];
    wsum += w;
  }

  std::size_t m = 1;
  while (m < 4 * n) m <<= 1;
  std::vector<double> in(m, 0.0);
  std::copy(windowed.begin(), windowed.end(), in.begin());
  const std::size_t bins = m / 2 + 1;
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), out, FFTW_ESTIMATE);
  fftw_execute(plan);
  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  fftw_destroy_plan(plan);
  fftw_free(out);

  const std::size_t peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  const double bin_omega = 2.0 * pi / (static_cast<double>(m) * dt);
  double offset = 0.0;
  if (peak > 0 && peak + 1 < bins && mag[peak - 1] > 0.0 && mag[peak + 1] > 0.0) {
    const double a = std::log(mag[peak - 1]), b = std::log(mag[peak]), c = std::log(mag[peak + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  double omega = (static_cast<double>(peak) + offset) * bin_omega;

  if (peak > 0) {
    // golden-section search on the windowed transform around the estimate
    double lo = std::max(0.0, omega - bin_omega);
    double hi = omega + bin_omega;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = windowed_magnitude(windowed, dt, x1), f2 = windowed_magnitude(windowed, dt, x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, omega); ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = windowed_magnitude(windowed, dt, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = windowed_magnitude(windowed, dt, x1);
      }
    }
    omega = 0.5 * (lo + hi);
  }
  const double peak_mag = windowed_magnitude(windowed, dt, omega);
  // a real tone of amplitude A peaks at A * wsum / 2 (A * wsum at omega = 0)
  const double amplitude = peak == 0 ? peak_mag / wsum : 2.0 * peak_mag / wsum;
  return {omega, amplitude};
}

Tone dominant_frequency(const Trace& trace, const std::string& column) {
  const auto values = trace.column(column);
  return dominant_frequency(trace.times(), values);
}

double linear_trend(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::InvalidArgument, "linear_trend needs >= 2 matching samples");
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  return sxy / sxx;
}

double convergence_order(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw Error(ErrorKind::InvalidArgument, "convergence_order needs at least 3 pairs");
  std::vector<double> lh, le;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [h, err] = pairs[i];
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be positive");
    if (!(err > 0.0)) throw Error(ErrorKind::InvalidArgument, "errors must be positive");
    if (i > 0 && !(h < pairs[i - 1].first)) throw Error(ErrorKind::InvalidArgument, "h must decrease strictly");
    lh.push_back(std::log(h));
    le.push_back(std::log(err));
  }
  return linear_trend(lh, le);
}

}  // namespace emdec
