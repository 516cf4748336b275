// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_IO_ROMX_HPP
#define HYPERROM_IO_ROMX_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/dense.hpp"

namespace hyperrom {

// ROMX: magic "ROMX", u32 version (= 1), u64 rows, u64 cols, then rows*cols
// IEEE-754 doubles, row-major. All integers and payload are little-endian.
static_assert(std::endian::native == std::endian::little,
              "ROMX I/O assumes a little-endian host");

inline void write_romx(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_romx: cannot open " + path);
  const char magic[4] = {'R', 'O', 'M', 'X'};
  out.write(magic, 4);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw IoError("write_romx: short write to " + path);
}

inline void write_romx(const std::string& path, const Vector& v) {
  DenseMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  write_romx(path, m);
}

inline DenseMatrix read_romx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_romx: cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ROMX", 4) != 0)
    throw FormatError("read_romx: bad magic in " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (!in || version != 1)
    throw FormatError("read_romx: unsupported version in " + path);
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (!in) throw FormatError("read_romx: truncated header in " + path);
  DenseMatrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in || in.gcount() != static_cast<std::streamsize>(m.size() * sizeof(double)))
    throw FormatError("read_romx: truncated payload in " + path);
  return m;
}

inline Vector read_romx_vector(const std::string& path) {
  DenseMatrix m = read_romx(path);
  if (m.cols() != 1) throw FormatError("read_romx_vector: expected a single column in " + path);
  Vector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, 0);
  return v;
}

}  // namespace hyperrom

#endif
