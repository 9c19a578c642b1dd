#include <catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"
#include "wfl/field_io.hpp"
#include "wfl/spectral.hpp"

using namespace wfl;
using namespace wfl::io;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid formulas", "[grid]") {
  const auto g = make_grid<1>(32.0, 256);
  CHECK(g.spacing() == 0.25);
  CHECK_THAT(g.max_frequency(), WithinRel(4.0 * kPi, 1e-15));

  const auto gp = make_grid<1>(kPi, 8);
  const auto k = gp.frequencies();
  REQUIRE(k.size() == 8);
  for (int j = 0; j < 8; ++j) CHECK_THAT(k[j], WithinAbs(j - 4.0, 1e-14));

  CHECK(g.spacing() * static_cast<double>(g.points) == 2.0 * g.halfwidth);
  CHECK(make_grid<2>(16.0, 64).size() == 64 * 64);
}

TEST_CASE("grid preconditions", "[grid]") {
  CHECK_THROWS_WITH(make_grid<2>(16.0, 1000), Catch::Matchers::ContainsSubstring("power of two"));
  CHECK_THROWS_AS(make_grid<1>(16.0, 4), InvalidArgument);
  CHECK_THROWS_AS(make_grid<1>(0.0, 64), InvalidArgument);
  CHECK_THROWS_AS(make_grid<1>(-1.0, 64), InvalidArgument);
}

TEST_CASE("frequency list is symmetric except Nyquist", "[grid]") {
  const auto g = make_grid<1>(5.0, 32);
  const auto k = g.frequencies();
  CHECK_THAT(k.front(), WithinRel(-g.max_frequency(), 1e-15));
  for (std::size_t j = 1; j < k.size(); ++j) CHECK_THAT(k[j], WithinAbs(-k[k.size() - j], 1e-12));
}

TEST_CASE("forward transform of simple fields", "[spectral]") {
  const auto g = make_grid<1>(kPi, 8);
  const auto one = sample(g, [](const Vec<1>&) { return cplx(1.0); });
  const auto s = forward(one);
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double want = g.signed_index(m) == 0 ? 2.0 * kPi : 0.0;
    CHECK_THAT(std::abs(s.coeffs[m] - want), WithinAbs(0.0, 1e-13));
  }

  const auto g2 = make_grid<1>(8.0, 64);
  const long j0 = 5;
  const double k0 = j0 * g2.frequency_spacing();
  const auto e = sample(g2, [&](const Vec<1>& x) { return std::polar(1.0, k0 * x[0]); });
  const auto se = forward(e);
  for (std::size_t m = 0; m < se.size(); ++m) {
    const double want = g2.signed_index(m) == j0 ? 2.0 * g2.halfwidth : 0.0;
    CHECK_THAT(std::abs(se.coeffs[m] - want), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("inverse undoes forward", "[spectral][property]") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto g1 = make_grid<1>(3.0 + seed, 128);
    const auto f1 = test::random_field(g1, seed);
    CHECK(test::max_abs_diff(inverse(forward(f1)), f1) / test::max_abs(f1) < 1e-12);
    const auto g2 = make_grid<2>(2.0 + seed, 32);
    const auto f2 = test::random_field(g2, 100 + seed);
    CHECK(test::max_abs_diff(inverse(forward(f2)), f2) / test::max_abs(f2) < 1e-12);
  }
}

TEST_CASE("discrete Parseval under the transform convention", "[spectral][property]") {
  auto check = [](const auto& f) {
    const double lhs = spectral_energy(forward(f));
    const double n2 = l2_norm(f);
    const double rhs = std::pow(2.0 * kPi, f.grid.dim) * n2 * n2;
    CHECK_THAT(lhs, WithinRel(rhs, 1e-10));
  };
  check(test::random_field(make_grid<1>(7.0, 256), 3));
  check(test::random_field(make_grid<2>(4.0, 32), 4));
}

TEST_CASE("multipliers", "[spectral]") {
  const auto g = make_grid<1>(kPi, 64);
  const auto f = test::random_bandlimited(g, 10, 11);
  CHECK(test::max_abs_diff(apply_multiplier(f, [](const Vec<1>&) { return 1.0; }), f) < 1e-13);

  const auto e = sample(g, [](const Vec<1>& x) { return std::polar(1.0, 3.0 * x[0]); });
  const auto de = apply_multiplier(e, [](const Vec<1>& k) { return cplx(0.0, k[0]); });
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(de[i] - cplx(0.0, 3.0) * e[i]) < 1e-12);

  // -f'' of a trigonometric polynomial, analytically.
  const auto p = sample(g, [](const Vec<1>& x) { return cplx(std::sin(2.0 * x[0]) + 0.5 * std::cos(7.0 * x[0])); });
  const auto lap = apply_multiplier(p, [](const Vec<1>& k) { return k[0] * k[0]; });
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i)[0];
    CHECK(std::abs(lap[i] - (4.0 * std::sin(2.0 * x) + 24.5 * std::cos(7.0 * x))) < 1e-11);
  }
  CHECK_THROWS_AS(apply_multiplier(f, [](const Vec<1>&) { return std::nan(""); }), InvalidArgument);
}

TEST_CASE("fractional Laplacian", "[spectral]") {
  const auto g = make_grid<1>(kPi, 64);
  const auto e = sample(g, [](const Vec<1>& x) { return std::polar(1.0, 2.0 * x[0]); });
  const auto fe = fractional_laplacian(e, 1.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(fe[i] - 2.8284271247461903 * e[i]) < 1e-12);

  const auto c = sample(g, [](const Vec<1>&) { return cplx(3.0); });
  CHECK(test::max_abs(fractional_laplacian(c, 0.7)) < 1e-13);

  const auto f = test::random_bandlimited(g, 12, 5);
  const auto direct = apply_multiplier(f, [](const Vec<1>& k) { return std::abs(k[0]); });
  CHECK(test::max_abs_diff(fractional_laplacian(f, 1.0), direct) < 1e-12);

  CHECK_THROWS_AS(fractional_laplacian(f, 2.0), InvalidArgument);
  CHECK_THROWS_AS(fractional_laplacian(f, 0.0), InvalidArgument);
}

TEST_CASE("fractional Laplacian is linear and keeps real even data real even", "[spectral][property]") {
  const auto g = make_grid<1>(6.0, 128);
  const auto f = test::random_field(g, 21);
  const auto h = test::random_field(g, 22);
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  ComplexField<1> comb(g);
  for (std::size_t i = 0; i < g.size(); ++i) comb.samples[i] = a * f[i] + b * h[i];
  const auto lhs = fractional_laplacian(comb, 1.3);
  const auto lf = fractional_laplacian(f, 1.3), lh = fractional_laplacian(h, 1.3);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(lhs[i] - (a * lf[i] + b * lh[i])) < 1e-11);

  // Even about x = 0: node j mirrors to node N - j.
  const auto even = sample(g, [](const Vec<1>& x) { return cplx(std::exp(-x[0] * x[0]) * (1.0 + std::cos(3.0 * x[0]))); });
  const auto le = fractional_laplacian(even, 0.8);
  for (std::size_t j = 1; j < g.points; ++j) {
    CHECK(std::abs(le[j].imag()) < 1e-12);
    CHECK_THAT(le[j].real(), WithinAbs(le[g.points - j].real(), 1e-11));
  }
}

TEST_CASE("near-quadratic exponent approaches the Laplacian", "[spectral]") {
  const auto g = make_grid<1>(kPi, 16);
  for (int j = 1; j <= 4; ++j) {
    const auto e = sample(g, [j](const Vec<1>& x) { return std::polar(1.0, j * x[0]); });
    const auto a = fractional_laplacian(e, 1.999);
    const auto b = apply_multiplier(e, [](const Vec<1>& k) { return k[0] * k[0]; });
    CHECK(std::abs(a[0] - b[0]) / std::abs(b[0]) < 3e-3);
  }
}

TEST_CASE("norms", "[spectral]") {
  const auto g = make_grid<1>(kPi, 64);
  CHECK_THAT(l2_norm(sample(g, [](const Vec<1>&) { return cplx(1.0); })), WithinRel(std::sqrt(2.0 * kPi), 1e-14));
  const auto f = test::random_field(g, 9);
  auto m = f;
  for (std::size_t i = 0; i < g.size(); ++i) m.samples[i] *= std::polar(1.0, 5.0 * g.node(i)[0]);
  CHECK_THAT(l2_norm(m), WithinRel(l2_norm(f), 1e-14));

  const auto gw = make_grid<1>(32.0, 1024);
  const auto gauss = sample(gw, [](const Vec<1>& x) { return cplx(std::exp(-x[0] * x[0] / 2.0)); });
  CHECK_THAT(l2_norm(gauss), WithinAbs(std::sqrt(std::sqrt(kPi)), 1e-10));
}

TEST_CASE("field serialization round trips", "[field_io]") {
  const auto f1 = test::random_field(make_grid<1>(4.5, 32), 1);
  std::stringstream bin;
  write_wfld(bin, f1);
  CHECK(bin.str().size() == kWfldHeaderBytes + 32 * 16);
  CHECK(bin.str().substr(0, 4) == "WFLD");
  const auto back = read_wfld<1>(bin);
  CHECK(back.grid == f1.grid);
  CHECK(back.samples == f1.samples);

  const auto f2 = test::random_field(make_grid<2>(2.0, 8), 2);
  std::stringstream csv;
  write_csv(csv, f2);
  CHECK(csv.str().rfind("i0,i1,re,im\n", 0) == 0);
  CHECK(read_csv<2>(csv, f2.grid).samples == f2.samples);

  std::stringstream wrong_dim;
  write_wfld(wrong_dim, f2);
  CHECK_THROWS_AS(read_wfld<1>(wrong_dim), Error);
  std::stringstream junk("JUNKJUNKJUNK");
  CHECK_THROWS_AS(read_wfld<1>(junk), Error);
}
