#ifndef LOGSENSE_FIELD_IO_HPP_
#define LOGSENSE_FIELD_IO_HPP_

// Field snapshot export.
//
// CSV: header "x[,y[,z]],value", one row per cell in storage order.
//
// Binary dump (little-endian, no padding):
//   uint32  dim
//   uint64  cells[dim]
//   float64 spacing[dim]
//   float64 values[cells[0]*...*cells[dim-1]]   (row-major, last axis fastest)

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "logsense/grid.hpp"

namespace logsense {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
inline void put_le(std::string& buf, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
inline T get_le(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IoError("binary dump: truncated");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline std::string encode_binary(const Field& f) {
  const Grid& g = f.grid;
  std::string buf;
  buf.reserve(4 + 16 * g.dim + 8 * f.size());
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) detail::put_le<std::uint64_t>(buf, g.cells[a]);
  for (int a = 0; a < g.dim; ++a) detail::put_le<double>(buf, g.h[a]);
  for (double x : f.values) detail::put_le<double>(buf, x);
  return buf;
}

inline Field decode_binary(const std::string& buf) {
  std::size_t pos = 0;
  const auto dim = detail::get_le<std::uint32_t>(buf, pos);
  if (dim < 1 || dim > 3) throw IoError("binary dump: bad dimension");
  std::vector<std::size_t> cells(dim);
  std::vector<double> extents(dim);
  for (auto& c : cells) c = static_cast<std::size_t>(detail::get_le<std::uint64_t>(buf, pos));
  for (std::uint32_t a = 0; a < dim; ++a) extents[a] = detail::get_le<double>(buf, pos) * static_cast<double>(cells[a]);
  Field f(Grid::make(cells, extents));
  for (double& x : f.values) x = detail::get_le<double>(buf, pos);
  if (pos != buf.size()) throw IoError("binary dump: trailing bytes");
  return f;
}

inline void write_binary(const Field& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  const std::string buf = encode_binary(f);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline Field read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_binary(ss.str());
}

inline void write_csv(const Field& f, std::ostream& out) {
  static const char* names[] = {"x", "y", "z"};
  const Grid& g = f.grid;
  for (int a = 0; a < g.dim; ++a) out << names[a] << ',';
  out << "value\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto m = g.unravel(i);
    for (int a = 0; a < g.dim; ++a) out << g.center(a, m[a]) << ',';
    out << f.values[i] << '\n';
  }
}

inline void write_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  write_csv(f, out);
}

}  // namespace logsense

#endif  // LOGSENSE_FIELD_IO_HPP_
