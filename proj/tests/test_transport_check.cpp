#include <catch_amalgamated.hpp>

#include <random>

#include "wfl/transport_check.hpp"

using namespace wfl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ComplexField<1> plane_wave(const GridSpec<1>& g, double k0) {
  return sample(g, [=](const Vec<1>& x) { return std::polar(1.0, k0 * x[0]); });
}

std::vector<PhasePoint<1>> lattice_at(std::initializer_list<double> xs, double xi) {
  std::vector<PhasePoint<1>> v;
  for (double x : xs) v.push_back({{x}, {xi}});
  return v;
}

}  // namespace

TEST_CASE("cutoff values", "[transport]") {
  const SymbolSplit s{1.5, 2.0};
  CHECK(cutoff_chi<1>({1.0}, s) == 1.0);
  CHECK(cutoff_chi<1>({6.0}, s) == 0.0);
  CHECK_THAT(cutoff_chi<1>({3.0}, s), WithinAbs(0.5, 1e-15));
  CHECK_THAT(cutoff_chi<2>({1.8, 2.4}, s), WithinAbs(0.5, 1e-15));
  CHECK(symbol_b<1>({1.9}, s) == 0.0);
  CHECK(symbol_a<1>({4.1}, s) == 0.0);
  CHECK(symbol_b<1>({4.1}, s) == std::pow(4.1, 1.5));
}

TEST_CASE("symbol split is an exact partition", "[transport][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10.0, 10.0), th(0.05, 1.95);
  for (int i = 0; i < 10000; ++i) {
    const SymbolSplit s{th(rng), 2.0};
    const Vec<2> eta{u(rng), u(rng)};
    const double full = std::pow(norm<2>(eta), s.theta);
    CHECK(std::abs(symbol_a<2>(eta, s) + symbol_b<2>(eta, s) - full) <= 4.0 * std::numeric_limits<double>::epsilon() * full);
  }
}

TEST_CASE("cutoff is monotone and smooth", "[transport][property]") {
  const SymbolSplit s{1.0, 1.0};
  const double h = 1e-3;
  double prev = 1.0, max_second = 0.0;
  for (double r = 0.0; r <= 3.0; r += h) {
    const double c = cutoff_chi<1>({r}, s);
    CHECK(c <= prev);
    prev = c;
    const double d2 = (cutoff_chi<1>({r + h}, s) - 2.0 * c + cutoff_chi<1>({r - h}, s)) / (h * h);
    max_second = std::max(max_second, std::abs(d2));
  }
  CHECK(max_second < 20.0);

  // The analytic gradient of b matches central differences across the ramp.
  for (double r : {0.5, 1.2, 1.5, 1.9, 2.5}) {
    const double fd = (symbol_b<1>({r + 1e-6}, s) - symbol_b<1>({r - 1e-6}, s)) / 2e-6;
    CHECK_THAT(symbol_b_gradient<1>({r}, s)[0], WithinAbs(fd, 1e-6));
  }
}

TEST_CASE("transport coefficient", "[transport]") {
  const SymbolSplit s{1.0, 0.5};
  CHECK_THAT(coefficient_P<1>({0.3}, {2.0}, zero_potential<1>(), s), WithinAbs(-2.0, 1e-15));

  const auto bump = bump_potential<1>(1.0, 2.0);
  const Vec<1> x{0.7};
  CHECK_THAT(coefficient_P<1>(x, {0.0}, bump, s), WithinAbs(-bump.value(x) + x[0] * bump.gradient(x)[0], 1e-15));

  const SymbolSplit s15{1.5, 0.5};
  CHECK_THAT(coefficient_P<1>({0.0}, {3.0}, bracket_power_potential<1>(1.0, 1.0), s15),
             WithinAbs(-std::pow(3.0, 1.5) - 1.0, 1e-13));
}

TEST_CASE("plane wave transform is analytic", "[transport]") {
  const auto g = make_grid<1>(4.0 * kPi, 1024);
  const double k0 = 8.0, theta = 1.5, t = 0.01;
  const auto w = scale_window(gaussian_window<1>(), 0.2, 8.0);
  auto analytic = [&](double x, double xi) {
    const double c = w.contraction();
    const double ft = w.amplitude() * std::sqrt(2.0 * kPi) / c * std::exp(-(xi - k0) * (xi - k0) / (2.0 * c * c));
    return std::polar(1.0, x * (k0 - xi)) * ft;
  };
  const auto snaps = transport_snapshots<1>(plane_wave(g, k0), theta, zero_potential<1>(), t, 1e-3, 1e-3);
  const cplx phase = std::polar(1.0, -t * std::pow(k0, theta));
  for (double x : {-1.0, 0.013, 2.5})
    for (double xi : {7.3, 8.0, 9.1}) {
      const cplx ref = analytic(x, xi);
      CHECK(std::abs(wpt_direct(plane_wave(g, k0), w, {x}, {xi}) - ref) < 1e-10);
      CHECK(std::abs(wpt_direct(snaps.now, w, {x}, {xi}) - phase * ref) < 1e-10);
    }
}

TEST_CASE("plane wave residual is stencil error", "[transport]") {
  const auto g = make_grid<1>(4.0 * kPi, 1024);
  const double k0 = 8.0, theta = 1.5, t = 0.01;
  const SymbolSplit split{theta, 1.0};
  const auto w = scale_window(gaussian_window<1>(), 0.2, 8.0);
  auto rho = [&](double h) {
    const auto snaps = transport_snapshots<1>(plane_wave(g, k0), theta, zero_potential<1>(), t, h, h);
    return transport_residual<1>(snaps, theta, zero_potential<1>(), split, w, lattice_at({-1.0, 0.0, 1.0}, k0), h, h);
  };
  const auto full = rho(1e-3);
  const auto half = rho(5e-4);
  CHECK(full.rho < 1e-3);
  CHECK(half.rho < full.rho);
  CHECK_THAT(full.rho / half.rho, WithinAbs(4.0, 0.5));
  CHECK(full.to_json()["stencil"]["dx"] == 1e-3);
}

TEST_CASE("zero potential reproduces the free specialization", "[transport][property]") {
  const auto g = make_grid<1>(16.0, 2048);
  const auto u0 = sample(g, [](const Vec<1>& x) { return std::exp(-x[0] * x[0] / 2.0) * std::polar(1.0, 20.0 * x[0]); });
  const SymbolSplit split{1.3, 2.0};
  const auto snaps = transport_snapshots<1>(u0, 1.3, zero_potential<1>(), 0.05, 1e-4, 1e-4);
  const auto w = scale_window(gaussian_window<1>(), 0.3, 20.0);
  const auto lat = lattice_at({-0.5, 0.0, 0.25, 1.0}, 20.0);
  const auto full = transport_residual<1>(snaps, 1.3, zero_potential<1>(), split, w, lat, 1e-3, 1e-3);
  const auto free = transport_residual_free<1>(snaps, split, w, lat, 1e-3, 1e-3);
  CHECK(full.max_residual == free.max_residual);
  CHECK(full.max_term == free.max_term);
  CHECK(full.rho == free.rho);
}

TEST_CASE("remainder shrinks as lambda doubles", "[transport]") {
  const auto g = make_grid<1>(16.0, 4096);
  const double theta = 1.5, t = 0.01;
  const auto pot = bump_potential<1>(1.0, 2.0);
  const SymbolSplit split{theta, 0.25 * 32.0 / 1.5};
  auto rho = [&](double lambda) {
    const auto u0 = sample(g, [=](const Vec<1>& x) { return std::exp(-x[0] * x[0] / 2.0) * std::polar(1.0, lambda * x[0]); });
    const auto snaps = transport_snapshots<1>(u0, theta, pot, t, 1e-5, 1e-5);
    const auto w = scale_window(gaussian_window<1>(), 0.2, lambda);
    return transport_residual<1>(snaps, theta, pot, split, w, lattice_at({-0.2, 0.0, 0.2}, lambda), 1e-3, 1e-3).rho;
  };
  const double r32 = rho(32.0), r64 = rho(64.0);
  INFO("rho(32) " << r32 << ", rho(64) " << r64);
  CHECK(r64 < r32);
}

TEST_CASE("transport inputs are checked", "[transport]") {
  const auto g = make_grid<1>(8.0, 256);
  const auto u0 = plane_wave(g, 2.0 * g.frequency_spacing());
  CHECK_THROWS_AS(transport_snapshots<1>(u0, 1.0, zero_potential<1>(), 0.0, 1e-3, 1e-3), InvalidArgument);
  const auto snaps = transport_snapshots<1>(u0, 1.0, zero_potential<1>(), 0.01, 1e-3, 1e-3);
  const SymbolSplit split{1.0, 1.0};
  const auto w = scale_window(gaussian_window<1>(), 0.5, 4.0);
  CHECK_THROWS_AS(transport_residual<1>(snaps, 1.0, zero_potential<1>(), split, w, lattice_at({0.0}, 200.0), 1e-3, 1e-3),
                  OutOfBand);
  CHECK_THROWS_AS(transport_residual<1>(snaps, 1.0, zero_potential<1>(), split, w, lattice_at({7.0}, 2.0), 1e-3, 1e-3),
                  InvalidArgument);
  CHECK_THROWS_AS(transport_residual<1>(snaps, 1.0, zero_potential<1>(), split, w, lattice_at({0.0}, 2.0), 0.0, 1e-3),
                  InvalidArgument);
}
