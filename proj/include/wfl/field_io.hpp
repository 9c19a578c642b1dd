#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wfl/grid.hpp"

namespace wfl::io {

// WFLD layout, all little-endian:
//   bytes  0..3   magic "WFLD"
//   bytes  4..7   uint32 dim
//   bytes  8..15  uint64 points per axis
//   bytes 16..23  float64 halfwidth
//   bytes 24..31  reserved, zero
// followed by points^dim pairs (re, im) of float64.
inline constexpr std::size_t kWfldHeaderBytes = 32;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw Error("WFLD stream truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

template <std::size_t Dim>
void write_wfld(std::ostream& os, const ComplexField<Dim>& f) {
  os.write("WFLD", 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(Dim));
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.points));
  detail::put_le<double>(os, f.grid.halfwidth);
  detail::put_le<std::uint64_t>(os, 0);
  for (const auto& z : f.samples) {
    detail::put_le<double>(os, z.real());
    detail::put_le<double>(os, z.imag());
  }
  if (!os) throw Error("failed writing WFLD stream");
}

template <std::size_t Dim>
ComplexField<Dim> read_wfld(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "WFLD", 4) != 0) throw Error("not a WFLD stream (bad magic)");
  const auto dim = detail::get_le<std::uint32_t>(is);
  if (dim != static_cast<std::uint32_t>(Dim)) {
    std::ostringstream os;
    os << "WFLD dimension " << dim << " does not match requested " << Dim;
    throw Error(os.str());
  }
  const auto points = detail::get_le<std::uint64_t>(is);
  const auto halfwidth = detail::get_le<double>(is);
  (void)detail::get_le<std::uint64_t>(is);
  const auto grid = make_grid<Dim>(halfwidth, static_cast<std::size_t>(points));
  ComplexField<Dim> f(grid);
  for (auto& z : f.samples) {
    const double re = detail::get_le<double>(is);
    const double im = detail::get_le<double>(is);
    z = cplx(re, im);
  }
  f.validate();
  return f;
}

template <std::size_t Dim>
void save_wfld(const std::string& path, const ComplexField<Dim>& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_wfld(os, f);
}

template <std::size_t Dim>
ComplexField<Dim> load_wfld(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_wfld<Dim>(is);
}

/// CSV with columns i0[,i1],re,im.
template <std::size_t Dim>
void write_csv(std::ostream& os, const ComplexField<Dim>& f) {
  os << (Dim == 1 ? "i0" : "i0,i1") << ",re,im\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = f.grid.unflatten(i);
    for (std::size_t a = 0; a < Dim; ++a) os << idx[a] << ',';
    os << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

template <std::size_t Dim>
ComplexField<Dim> read_csv(std::istream& is, const GridSpec<Dim>& grid) {
  std::string line;
  if (!std::getline(is, line)) throw Error("empty field CSV");
  ComplexField<Dim> f(grid);
  std::vector<bool> seen(f.size(), false);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::array<std::size_t, Dim> idx{};
    char comma;
    for (std::size_t a = 0; a < Dim; ++a) {
      if (!(ls >> idx[a] >> comma) || idx[a] >= grid.points) throw Error("bad index in field CSV: " + line);
    }
    double re, im;
    if (!(ls >> re >> comma >> im)) throw Error("bad value in field CSV: " + line);
    const std::size_t flat = grid.flatten(idx);
    f[flat] = cplx(re, im);
    seen[flat] = true;
    ++rows;
  }
  if (rows != f.size() || std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error("field CSV does not cover every grid node exactly once");
  f.validate();
  return f;
}

}  // namespace wfl::io
