#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <vector>

#include "wfl/core.hpp"

namespace wfl {

/// Periodic box [-L, L)^Dim sampled by N points per axis.
///
/// Node j on an axis sits at -L + j h with h = 2L/N. Frequencies are
/// k_m = pi m / L for m in {-N/2, ..., N/2 - 1}; spectral arrays are stored in
/// FFT order (m = 0, 1, ..., N/2 - 1, -N/2, ..., -1). The single Nyquist entry
/// is assigned the negative frequency -pi N / (2L).
template <std::size_t Dim>
struct GridSpec {
  static_assert(Dim == 1 || Dim == 2, "grids are one or two dimensional");

  double halfwidth = 0.0;
  std::size_t points = 0;

  static constexpr int dim = Dim;

  double spacing() const { return 2.0 * halfwidth / static_cast<double>(points); }
  double frequency_spacing() const { return kPi / halfwidth; }
  double max_frequency() const { return kPi * static_cast<double>(points) / (2.0 * halfwidth); }
  double cell_volume() const { return std::pow(spacing(), Dim); }
  double frequency_cell_volume() const { return std::pow(frequency_spacing(), Dim); }

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < Dim; ++i) n *= points;
    return n;
  }

  double coordinate(std::size_t j) const {
    return -halfwidth + static_cast<double>(j) * spacing();
  }

  /// Signed frequency index of FFT-order slot m.
  long signed_index(std::size_t m) const {
    const long n = static_cast<long>(points);
    const long mm = static_cast<long>(m);
    return mm < n / 2 ? mm : mm - n;
  }

  double frequency(std::size_t m) const {
    return static_cast<double>(signed_index(m)) * frequency_spacing();
  }

  /// FFT-order slot holding signed index s (s in [-N/2, N/2)).
  std::size_t slot(long s) const {
    const long n = static_cast<long>(points);
    return static_cast<std::size_t>(s < 0 ? s + n : s);
  }

  /// The sorted per-axis frequency list k_{-N/2}, ..., k_{N/2-1}.
  std::vector<double> frequencies() const {
    std::vector<double> k(points);
    const long n = static_cast<long>(points);
    for (long j = -n / 2; j < n / 2; ++j)
      k[static_cast<std::size_t>(j + n / 2)] = static_cast<double>(j) * frequency_spacing();
    return k;
  }

  std::array<std::size_t, Dim> unflatten(std::size_t flat) const {
    std::array<std::size_t, Dim> idx{};
    for (int a = Dim - 1; a >= 0; --a) {
      idx[a] = flat % points;
      flat /= points;
    }
    return idx;
  }

  std::size_t flatten(const std::array<std::size_t, Dim>& idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < Dim; ++a) flat = flat * points + idx[a];
    return flat;
  }

  Vec<Dim> node(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Vec<Dim> x{};
    for (std::size_t a = 0; a < Dim; ++a) x[a] = coordinate(idx[a]);
    return x;
  }

  /// Frequency vector of FFT-order flat slot.
  Vec<Dim> wavevector(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Vec<Dim> k{};
    for (std::size_t a = 0; a < Dim; ++a) k[a] = frequency(idx[a]);
    return k;
  }

  /// Nearest node index along one axis (periodic).
  std::size_t nearest_index(double x) const {
    const long n = static_cast<long>(points);
    long j = std::lround((x + halfwidth) / spacing());
    j %= n;
    if (j < 0) j += n;
    return static_cast<std::size_t>(j);
  }

  /// Wrap a displacement into [-L, L).
  double wrap(double d) const {
    const double period = 2.0 * halfwidth;
    double r = std::fmod(d + halfwidth, period);
    if (r < 0) r += period;
    return r - halfwidth;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.halfwidth == b.halfwidth && a.points == b.points;
  }
};

/// Validate and build a grid.
template <std::size_t Dim>
GridSpec<Dim> make_grid(double halfwidth, std::size_t points) {
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    std::ostringstream os;
    os << "grid halfwidth must be positive, got " << halfwidth;
    throw InvalidArgument(os.str());
  }
  if (points < 8 || !is_power_of_two(points)) {
    std::ostringstream os;
    os << "grid points must be a power of two >= 8, got " << points;
    throw InvalidArgument(os.str());
  }
  return GridSpec<Dim>{halfwidth, points};
}

/// Complex samples on a grid, row-major over axes (axis 0 slowest).
template <std::size_t Dim>
struct ComplexField {
  GridSpec<Dim> grid;
  std::vector<cplx> samples;

  ComplexField() = default;
  explicit ComplexField(const GridSpec<Dim>& g) : grid(g), samples(g.size(), cplx{}) {}
  ComplexField(const GridSpec<Dim>& g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
    validate();
  }

  std::size_t size() const { return samples.size(); }
  cplx& operator[](std::size_t i) { return samples[i]; }
  const cplx& operator[](std::size_t i) const { return samples[i]; }

  bool finite() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  void validate() const {
    if (samples.size() != grid.size())
      throw InvalidArgument("field sample count does not match grid size");
    if (!finite()) throw InvalidArgument("field contains non-finite samples");
  }
};

/// Sample a function of position on every node.
template <std::size_t Dim, class F>
ComplexField<Dim> sample(const GridSpec<Dim>& grid, F&& f) {
  ComplexField<Dim> u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = cplx(f(grid.node(i)));
  return u;
}

}  // namespace wfl
