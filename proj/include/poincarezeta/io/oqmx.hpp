#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

/// Binary complex matrix: "OQMX", u32 version, u32 rows, u32 cols, then
/// row-major (re, im) f64 pairs, all little-endian.
inline constexpr std::array<char, 4> kOqmxMagic{'O', 'Q', 'M', 'X'};
inline constexpr std::uint32_t kOqmxVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InvalidArgument("read_oqmx: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_oqmx(std::ostream& os, const CMat& m) {
  os.write(kOqmxMagic.data(), 4);
  detail::put_le<std::uint32_t>(os, kOqmxVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_le<double>(os, m(i, j).real());
      detail::put_le<double>(os, m(i, j).imag());
    }
}

inline CMat read_oqmx(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kOqmxMagic) throw InvalidArgument("read_oqmx: bad magic");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kOqmxVersion) throw InvalidArgument("read_oqmx: unsupported version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint32_t>(is);
  const auto cols = detail::get_le<std::uint32_t>(is);
  CMat m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      const double re = detail::get_le<double>(is);
      const double im = detail::get_le<double>(is);
      m(i, j) = Complex(re, im);
    }
  return m;
}

inline void write_oqmx_file(const std::string& path, const CMat& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("write_oqmx: cannot open " + path);
  write_oqmx(os, m);
}

inline CMat read_oqmx_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_oqmx: cannot open " + path);
  return read_oqmx(is);
}

}  // namespace poincarezeta
