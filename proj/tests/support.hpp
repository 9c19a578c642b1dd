#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "wfl/grid.hpp"
#include "wfl/spectral.hpp"

namespace wfl::test {

/// Reproducible complex noise in [-1, 1]^2 per sample.
template <std::size_t Dim>
ComplexField<Dim> random_field(const GridSpec<Dim>& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexField<Dim> f(grid);
  for (auto& z : f.samples) z = cplx(u(rng), u(rng));
  return f;
}

/// Random trigonometric polynomial using only |k index| <= kmax_index.
inline ComplexField<1> random_bandlimited(const GridSpec<1>& grid, int kmax_index, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c(2 * kmax_index + 1);
  for (auto& z : c) z = cplx(u(rng), u(rng));
  return sample(grid, [&](const Vec<1>& x) {
    cplx s{};
    for (int j = -kmax_index; j <= kmax_index; ++j)
      s += c[j + kmax_index] * std::polar(1.0, j * grid.frequency_spacing() * x[0]);
    return s;
  });
}

template <std::size_t Dim>
double max_abs_diff(const ComplexField<Dim>& a, const ComplexField<Dim>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <std::size_t Dim>
double max_abs(const ComplexField<Dim>& a) {
  double m = 0.0;
  for (const auto& z : a.samples) m = std::max(m, std::abs(z));
  return m;
}

template <std::size_t Dim>
double relative_l2(const ComplexField<Dim>& a, const ComplexField<Dim>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace wfl::test
