#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wfl/parallel.hpp"
#include "wfl/spectral.hpp"

namespace wfl {

/// A Schwartz window phi, with the radius beyond which it is treated as zero.
template <std::size_t Dim>
struct Window {
  std::string label;
  std::function<cplx(const Vec<Dim>&)> profile;
  double support_radius = 12.0;
};

/// phi(y) = e^{-|y|^2/2}.
template <std::size_t Dim>
Window<Dim> gaussian_window() {
  return {"gaussian", [](const Vec<Dim>& y) { return cplx(std::exp(-0.5 * dot<Dim>(y, y))); }, 12.0};
}

/// phi(y) = y_1 e^{-|y|^2/2}; vanishes at the origin but is not identically zero.
template <std::size_t Dim>
Window<Dim> hermite1_window() {
  return {"hermite1", [](const Vec<Dim>& y) { return cplx(y[0] * std::exp(-0.5 * dot<Dim>(y, y))); }, 12.0};
}

template <std::size_t Dim>
Window<Dim> window_by_name(const std::string& name) {
  if (name == "gaussian") return gaussian_window<Dim>();
  if (name == "hermite1") return hermite1_window<Dim>();
  throw InvalidArgument("unknown window '" + name + "'");
}

/// phi_lambda(y) = lambda^{Dim b / 2} phi(lambda^b y).
template <std::size_t Dim>
struct ScaledWindow {
  Window<Dim> base;
  double b = 0.5;
  double lambda = 1.0;

  double amplitude() const { return std::pow(lambda, Dim * b / 2.0); }
  double contraction() const { return std::pow(lambda, b); }

  cplx operator()(const Vec<Dim>& y) const { return amplitude() * base.profile(contraction() * y); }

  /// Radius in y outside which the scaled window is dropped.
  double support_radius() const { return base.support_radius / contraction(); }

  /// The unscaled window itself (lambda = 1).
  static ScaledWindow unscaled(Window<Dim> w) { return {std::move(w), 0.5, 1.0}; }
};

template <std::size_t Dim>
ScaledWindow<Dim> scale_window(Window<Dim> w, double b, double lambda) {
  if (!(b > 0.0 && b < 1.0)) {
    std::ostringstream os;
    os << "scaling exponent b must lie in (0, 1), got " << b;
    throw InvalidArgument(os.str());
  }
  if (!(lambda >= 1.0)) throw InvalidArgument("scale lambda must be >= 1");
  return {std::move(w), b, lambda};
}

/// Discrete L2 norm of a window sampled on a grid around the origin.
template <std::size_t Dim>
double window_norm(const ScaledWindow<Dim>& w, const GridSpec<Dim>& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += std::norm(w(grid.node(i)));
  return std::sqrt(s * grid.cell_volume());
}

namespace detail {

// Visits every node within the window's support around x as (flat index,
// continuous displacement d = y - x). When the support covers the box the
// displacement is the minimal periodic image in [-L, L).
template <std::size_t Dim, class F>
void for_each_in_support(const GridSpec<Dim>& grid, const Vec<Dim>& x, double radius, F&& f) {
  const double h = grid.spacing();
  const long n = static_cast<long>(grid.points);
  const long reach = static_cast<long>(std::ceil(radius / h)) + 1;
  const bool whole = 2 * reach + 1 >= n;

  std::array<std::vector<std::pair<std::size_t, double>>, Dim> axis;
  for (std::size_t a = 0; a < Dim; ++a) {
    if (whole) {
      for (long j = 0; j < n; ++j) {
        const double d = grid.wrap(grid.coordinate(static_cast<std::size_t>(j)) - x[a]);
        if (std::abs(d) > radius) continue;
        axis[a].emplace_back(static_cast<std::size_t>(j), d);
      }
    } else {
      const long jc = static_cast<long>(std::floor((x[a] + grid.halfwidth) / h));
      for (long m = -reach; m <= reach + 1; ++m) {
        const long j = jc + m;
        const double d = -grid.halfwidth + static_cast<double>(j) * h - x[a];
        if (std::abs(d) > radius) continue;
        long jj = j % n;
        if (jj < 0) jj += n;
        axis[a].emplace_back(static_cast<std::size_t>(jj), d);
      }
    }
  }
  if constexpr (Dim == 1) {
    for (const auto& [j, d] : axis[0]) f(j, Vec<1>{d});
  } else {
    const double r2 = radius * radius;
    for (const auto& [j0, d0] : axis[0])
      for (const auto& [j1, d1] : axis[1]) {
        if (d0 * d0 + d1 * d1 > r2) continue;
        f(j0 * grid.points + j1, Vec<2>{d0, d1});
      }
  }
}

}  // namespace detail

/// W_phi[f](x, xi) = int conj(phi(y - x)) f(y) e^{-i y.xi} dy by Riemann sum.
/// x and xi are arbitrary; the window is evaluated analytically at y - x.
template <std::size_t Dim>
cplx wpt_direct(const ComplexField<Dim>& f, const ScaledWindow<Dim>& w, const Vec<Dim>& x, const Vec<Dim>& xi) {
  cplx acc{};
  detail::for_each_in_support<Dim>(f.grid, x, w.support_radius(), [&](std::size_t j, const Vec<Dim>& d) {
    const cplx fj = f.samples[j];
    if (fj == cplx{}) return;
    acc += std::conj(w(d)) * fj * std::polar(1.0, -dot<Dim>(x + d, xi));
  });
  return acc * f.grid.cell_volume();
}

/// W values on a set of positions x (rows) and momenta xi (columns).
template <std::size_t Dim>
struct WptSlice {
  std::vector<Vec<Dim>> x_set;
  std::vector<Vec<Dim>> xi_set;
  std::vector<cplx> values;  // row-major (x, xi)

  cplx operator()(std::size_t ix, std::size_t ik) const { return values[ix * xi_set.size() + ik]; }

  void write_csv(std::ostream& os) const {
    for (std::size_t a = 0; a < Dim; ++a) os << "x" << a << ',';
    for (std::size_t a = 0; a < Dim; ++a) os << "xi" << a << ',';
    os << "re,im,abs\n" << std::setprecision(17);
    for (std::size_t i = 0; i < x_set.size(); ++i)
      for (std::size_t k = 0; k < xi_set.size(); ++k) {
        for (std::size_t a = 0; a < Dim; ++a) os << x_set[i][a] << ',';
        for (std::size_t a = 0; a < Dim; ++a) os << xi_set[k][a] << ',';
        const cplx v = (*this)(i, k);
        os << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
      }
  }
};

/// Signed grid frequency index for xi; throws OutOfBand past the band and
/// InvalidArgument when xi is not on the frequency grid (beyond tol).
template <std::size_t Dim>
std::array<long, Dim> frequency_index(const GridSpec<Dim>& grid, const Vec<Dim>& xi, double tol = 1e-9) {
  std::array<long, Dim> idx{};
  const long half = static_cast<long>(grid.points) / 2;
  for (std::size_t a = 0; a < Dim; ++a) {
    const double q = xi[a] / grid.frequency_spacing();
    const long s = std::lround(q);
    if (s < -half || s >= half) {
      std::ostringstream os;
      os << "momentum " << xi[a] << " exceeds the grid band (max " << grid.max_frequency() << ")";
      throw OutOfBand(os.str(), next_power_of_two(2.0 * grid.halfwidth * (std::abs(xi[a]) + grid.frequency_spacing()) / kPi));
    }
    if (std::abs(q - static_cast<double>(s)) > tol)
      throw InvalidArgument("momentum is not on the frequency grid; round it or use wpt_direct");
    idx[a] = s;
  }
  return idx;
}

/// Fast evaluation: for each grid position x one forward transform of
/// y -> conj(phi(y)) f(y + x), then W(x, xi) = e^{-i x.xi} F[...](xi).
/// Positions must be grid nodes and momenta grid frequencies.
template <std::size_t Dim>
WptSlice<Dim> wpt_fast(const ComplexField<Dim>& f, const ScaledWindow<Dim>& w, const std::vector<Vec<Dim>>& x_set,
                       const std::vector<Vec<Dim>>& xi_set) {
  const auto& grid = f.grid;
  const double h = grid.spacing();
  std::vector<std::array<long, Dim>> kidx;
  kidx.reserve(xi_set.size());
  for (const auto& xi : xi_set) kidx.push_back(frequency_index(grid, xi));

  std::vector<std::array<std::size_t, Dim>> xnodes;
  for (const auto& x : x_set) {
    std::array<std::size_t, Dim> idx{};
    for (std::size_t a = 0; a < Dim; ++a) {
      const double q = (x[a] + grid.halfwidth) / h;
      if (std::abs(q - std::round(q)) > 1e-9) throw InvalidArgument("wpt_fast positions must be grid nodes");
      idx[a] = grid.nearest_index(x[a]);
    }
    xnodes.push_back(idx);
  }

  // Window samples at the displacement grid d_m = -L + m h.
  std::vector<cplx> win(grid.size());
  const double radius = w.support_radius();
  for (std::size_t m = 0; m < win.size(); ++m) {
    const auto d = grid.node(m);
    win[m] = norm<Dim>(d) <= radius ? std::conj(w(d)) : cplx{};
  }

  WptSlice<Dim> slice{x_set, xi_set, std::vector<cplx>(x_set.size() * xi_set.size())};
  const std::size_t n = grid.points;
  parallel_for(x_set.size(), [&](std::size_t ix) {
    ComplexField<Dim> g(grid);
    for (std::size_t m = 0; m < g.size(); ++m) {
      if (win[m] == cplx{}) continue;
      const auto mi = grid.unflatten(m);
      std::array<std::size_t, Dim> src{};
      for (std::size_t a = 0; a < Dim; ++a) src[a] = (xnodes[ix][a] + mi[a] + n / 2) % n;
      g.samples[m] = win[m] * f.samples[grid.flatten(src)];
    }
    const auto spec = forward(g);
    for (std::size_t k = 0; k < xi_set.size(); ++k) {
      const double phase = -dot<Dim>(x_set[ix], xi_set[k]);
      slice.values[ix * xi_set.size() + k] = std::polar(1.0, phase) * spec.at(kidx[k]);
    }
  });
  return slice;
}

}  // namespace wfl
