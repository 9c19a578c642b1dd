#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "support.hpp"
#include "wfl/wavepacket.hpp"

using namespace wfl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ComplexField<1> discrete_delta(const GridSpec<1>& g, double x0) {
  ComplexField<1> f(g);
  f.samples[g.nearest_index(x0)] = cplx(1.0 / g.spacing());
  return f;
}

std::vector<Vec<1>> all_nodes(const GridSpec<1>& g) {
  std::vector<Vec<1>> v;
  for (std::size_t i = 0; i < g.size(); ++i) v.push_back(g.node(i));
  return v;
}

std::vector<Vec<1>> all_frequencies(const GridSpec<1>& g) {
  std::vector<Vec<1>> v;
  for (double k : g.frequencies()) v.push_back({k});
  return v;
}

// Sum of |W|^2 h dk over the full lattice, evaluated straight from the
// definition with periodic translation of f.
double brute_lattice_energy(const ComplexField<1>& f, const ScaledWindow<1>& w) {
  const auto& g = f.grid;
  const std::size_t n = g.points;
  const double h = g.spacing();
  double total = 0.0;
  for (std::size_t ix = 0; ix < n; ++ix)
    for (double k : g.frequencies()) {
      cplx acc{};
      for (std::size_t m = 0; m < n; ++m) {
        const double d = g.coordinate(m);
        const std::size_t j = (ix + m + n / 2) % n;
        acc += std::conj(w(Vec<1>{d})) * f[j] * std::polar(1.0, -(g.coordinate(ix) + d) * k);
      }
      total += std::norm(acc * h);
    }
  return total * h * g.frequency_spacing();
}

}  // namespace

TEST_CASE("window profiles", "[wavepacket]") {
  const auto gw = gaussian_window<1>();
  const auto hw = hermite1_window<1>();
  CHECK(gw.profile({0.0}) == cplx(1.0));
  CHECK(hw.profile({0.0}) == cplx(0.0));
  CHECK_THAT(hw.profile({1.0}).real(), WithinRel(std::exp(-0.5), 1e-15));
  CHECK(window_by_name<2>("hermite1").profile({1.0, 1.0}) == cplx(std::exp(-1.0)));
  CHECK_THROWS_AS(window_by_name<1>("boxcar"), InvalidArgument);

  const auto s = scale_window(gw, 0.5, 16.0);
  for (double x : {0.0, 0.1, 0.3, -0.7})
    CHECK_THAT(s({x}).real(), WithinRel(2.0 * std::exp(-8.0 * x * x), 1e-14));
  CHECK_THAT(s.support_radius(), WithinRel(3.0, 1e-15));
  CHECK_THROWS_AS(scale_window(gw, 1.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(scale_window(gw, 0.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(scale_window(gw, 0.5, 0.5), InvalidArgument);
}

TEST_CASE("scaled windows keep their norm", "[wavepacket][property]") {
  const auto g = make_grid<1>(16.0, 8192);
  const auto g2 = make_grid<2>(8.0, 512);
  for (double lambda : {1.0, 4.0, 64.0, 1024.0}) {
    CHECK_THAT(window_norm(scale_window(gaussian_window<1>(), 0.5, lambda), g), WithinRel(std::pow(kPi, 0.25), 1e-10));
    CHECK_THAT(window_norm(scale_window(hermite1_window<1>(), 0.25, lambda), g),
               WithinRel(std::pow(kPi, 0.25) / std::sqrt(2.0), 1e-10));
    if (lambda <= 64.0)
      CHECK_THAT(window_norm(scale_window(gaussian_window<2>(), 0.5, lambda), g2), WithinRel(std::sqrt(kPi), 1e-10));
  }
}

TEST_CASE("direct transform examples", "[wavepacket]") {
  const auto g = make_grid<1>(16.0, 512);
  const auto f = sample(g, [](const Vec<1>& x) { return cplx(std::exp(-0.5 * x[0] * x[0])); });
  const auto w1 = ScaledWindow<1>::unscaled(gaussian_window<1>());
  const cplx v = wpt_direct(f, w1, {0.0}, {0.0});
  CHECK_THAT(v.real(), WithinRel(std::sqrt(kPi), 1e-12));
  CHECK_THAT(v.imag(), WithinAbs(0.0, 1e-14));

  const auto d = discrete_delta(g, 0.0);
  const auto w = scale_window(gaussian_window<1>(), 0.25, 256.0);
  CHECK_THAT(std::abs(wpt_direct(d, w, {0.0}, {0.0})), WithinRel(2.0, 1e-14));
  CHECK_THAT(std::abs(wpt_direct(d, w, {0.1}, {0.0})), WithinRel(2.0 * std::exp(-0.5 * 16.0 * 0.01), 1e-14));

  CHECK(wpt_direct(ComplexField<1>(g), w, {1.3}, {2.7}) == cplx{});
}

TEST_CASE("fast transform matches the quadrature", "[wavepacket][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ub(0.1, 0.9), ul(1.0, 300.0);
  for (std::size_t n : {128u, 256u}) {
    const auto g = make_grid<1>(8.0, n);
    std::uniform_int_distribution<long> ui(0, static_cast<long>(n) - 1), uk(-static_cast<long>(n) / 2, n / 2 - 1);
    for (int c = 0; c < 50; ++c) {
      const auto f = test::random_field(g, 100 + c);
      const auto w = scale_window(c % 2 ? hermite1_window<1>() : gaussian_window<1>(), ub(rng), ul(rng));
      const Vec<1> x = g.node(static_cast<std::size_t>(ui(rng)));
      const Vec<1> xi{static_cast<double>(uk(rng)) * g.frequency_spacing()};
      const cplx direct = wpt_direct(f, w, x, xi);
      const cplx fast = wpt_fast(f, w, {x}, {xi})(0, 0);
      INFO("n " << n << " case " << c);
      CHECK(std::abs(fast - direct) <= 1e-10 * std::abs(direct));
    }
  }
}

TEST_CASE("fast transform rejects off-grid requests", "[wavepacket]") {
  const auto g = make_grid<1>(8.0, 64);
  const auto f = test::random_field(g, 3);
  const auto w = scale_window(gaussian_window<1>(), 0.5, 4.0);
  try {
    wpt_fast(f, w, {{0.0}}, {{100.0}});
    FAIL("expected an out-of-band error");
  } catch (const OutOfBand& e) {
    CHECK(e.minimal_points() >= 512);
    CHECK(100.0 < make_grid<1>(8.0, e.minimal_points()).max_frequency());
  }
  CHECK_THROWS_AS(wpt_fast(f, w, {{0.0}}, {{0.5 * g.frequency_spacing()}}), InvalidArgument);
  CHECK_THROWS_AS(wpt_fast(f, w, {{0.1}}, {{0.0}}), InvalidArgument);
}

TEST_CASE("translation and modulation covariance", "[wavepacket][property]") {
  const auto g = make_grid<1>(8.0, 256);
  const auto f = test::random_field(g, 11);
  const auto w = scale_window(gaussian_window<1>(), 0.5, 9.0);
  const long shift = 13;
  const double a = static_cast<double>(shift) * g.spacing();
  ComplexField<1> fa(g);
  for (std::size_t j = 0; j < g.size(); ++j) fa.samples[(j + shift) % g.size()] = f[j];

  const long eta_idx = 5;
  const double eta = static_cast<double>(eta_idx) * g.frequency_spacing();
  auto fm = f;
  for (std::size_t j = 0; j < g.size(); ++j) fm.samples[j] *= std::polar(1.0, eta * g.coordinate(j));

  for (long ix : {40L, 128L, 200L})
    for (long ik : {-20L, 0L, 17L}) {
      const Vec<1> x = g.node(static_cast<std::size_t>(ix));
      const Vec<1> xm = g.node(static_cast<std::size_t>(ix - shift));
      const Vec<1> xi{static_cast<double>(ik) * g.frequency_spacing()};
      const Vec<1> xi_old{xi[0] - eta};
      const cplx lhs = wpt_fast(fa, w, {x}, {xi})(0, 0);
      const cplx rhs = std::polar(1.0, -a * xi[0]) * wpt_fast(f, w, {xm}, {xi})(0, 0);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
      const cplx mod = wpt_fast(fm, w, {x}, {xi})(0, 0);
      const cplx old = wpt_fast(f, w, {x}, {xi_old})(0, 0);
      CHECK(std::abs(mod - old) <= 1e-12 * std::abs(old));
    }
}

TEST_CASE("linear in f, conjugate linear in the window", "[wavepacket][property]") {
  const auto g = make_grid<1>(8.0, 128);
  const auto f1 = test::random_field(g, 21);
  const auto f2 = test::random_field(g, 22);
  const cplx alpha(0.3, -1.2), beta(-2.0, 0.5);
  ComplexField<1> mix(g);
  for (std::size_t j = 0; j < g.size(); ++j) mix.samples[j] = alpha * f1[j] + beta * f2[j];

  const auto base = gaussian_window<1>();
  Window<1> scaled_profile{"scaled", [&](const Vec<1>& y) { return alpha * base.profile(y); }, base.support_radius};
  const auto w = scale_window(base, 0.4, 20.0);
  const auto wa = scale_window(scaled_profile, 0.4, 20.0);

  for (const Vec<1> x : {Vec<1>{-1.25}, Vec<1>{0.0}, Vec<1>{3.5}})
    for (const Vec<1> xi : {Vec<1>{-3.0}, Vec<1>{0.7}, Vec<1>{12.0}}) {
      const cplx lin = alpha * wpt_direct(f1, w, x, xi) + beta * wpt_direct(f2, w, x, xi);
      CHECK(std::abs(wpt_direct(mix, w, x, xi) - lin) <= 1e-12 * std::abs(lin));
      const cplx conj_lin = std::conj(alpha) * wpt_direct(f1, w, x, xi);
      CHECK(std::abs(wpt_direct(f1, wa, x, xi) - conj_lin) <= 1e-12 * std::abs(conj_lin));
    }
}

TEST_CASE("lattice energy identity", "[wavepacket][property]") {
  // Oracle: the constant relating lattice energy to ||phi||^2 ||f||^2 is
  // found by brute force on a 16 point grid, then frozen and reused.
  const auto small = make_grid<1>(4.0, 16);
  const auto fs = test::random_field(small, 5);
  const auto ws = ScaledWindow<1>::unscaled(gaussian_window<1>());
  const double nf = l2_norm(fs), nw = window_norm(ws, small);
  const double constant = brute_lattice_energy(fs, ws) / (nf * nf * nw * nw);
  CHECK_THAT(constant, WithinRel(2.0 * kPi, 1e-6));

  const double kConstant = 2.0 * kPi;
  auto lattice_energy = [](const ComplexField<1>& f, const ScaledWindow<1>& w) {
    const auto slice = wpt_fast(f, w, all_nodes(f.grid), all_frequencies(f.grid));
    double s = 0.0;
    for (const auto& v : slice.values) s += std::norm(v);
    return s * f.grid.spacing() * f.grid.frequency_spacing();
  };
  CHECK_THAT(lattice_energy(fs, ws), WithinRel(kConstant * nf * nf * nw * nw, 1e-6));

  const auto g = make_grid<1>(8.0, 256);
  for (unsigned seed : {1u, 2u}) {
    const auto f = test::random_field(g, seed);
    for (const auto& w : {scale_window(gaussian_window<1>(), 0.5, 16.0), scale_window(hermite1_window<1>(), 0.3, 50.0)}) {
      const double a = l2_norm(f), b = window_norm(w, g);
      CHECK_THAT(lattice_energy(f, w), WithinRel(kConstant * a * a * b * b, 1e-6));
    }
  }
}

TEST_CASE("scaled packets grow on a delta with exponent b/2", "[wavepacket][property]") {
  const auto g = make_grid<1>(8.0, 1024);
  const double x0 = g.coordinate(600);
  const auto d = discrete_delta(g, x0);
  for (double b : {0.25, 0.5, 0.75}) {
    std::vector<double> lx, ly;
    for (double lambda = 8.0; lambda <= 256.0; lambda *= 2.0) {
      const auto w = scale_window(gaussian_window<1>(), b, lambda);
      lx.push_back(std::log(lambda));
      ly.push_back(std::log(std::abs(wpt_direct(d, w, {x0}, {lambda}))));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK_THAT(sxy / sxx, WithinAbs(b / 2.0, 0.01));
  }
}

TEST_CASE("slice export", "[wavepacket]") {
  const auto g = make_grid<2>(4.0, 16);
  const auto f = test::random_field(g, 9);
  const auto w = scale_window(gaussian_window<2>(), 0.5, 4.0);
  const auto slice = wpt_fast(f, w, {Vec<2>{0.0, 0.5}, Vec<2>{-1.0, 1.0}}, {Vec<2>{0.0, 0.0}, Vec<2>{kPi / 4.0, -kPi / 2.0}});
  REQUIRE(slice.values.size() == 4);
  std::ostringstream os;
  slice.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x0,x1,xi0,xi1,re,im,abs");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
  CHECK(std::abs(slice(1, 1) - wpt_direct(f, w, {-1.0, 1.0}, {kPi / 4.0, -kPi / 2.0})) < 1e-12);
}
