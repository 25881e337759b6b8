#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "altchain/imps.hpp"

namespace altchain::imps {

// Binary checkpoint, format version 1. Little-endian throughout.
//
//   offset  size  field
//   0       4     magic "IMPS"
//   4       4     u32 format version (1)
//   8       4     u32 physical dimension d (2)
//   12      4     u32 chi of the odd bond
//   16      4     u32 chi of the even bond
//   20      4     u32 unit-cell size (2)
//   24      ...   site tensors G_A then G_B; per site, d blocks (s = 0..d-1)
//                 of (left x right) complex entries in row-major order, each
//                 entry an (re, im) pair of 8-byte floats
//   ...     ...   weight vectors: odd bond then even bond, 8-byte floats
//
// G_A blocks are chi_even x chi_odd, G_B blocks chi_odd x chi_even.

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace detail_ckpt {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}
inline std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace detail_ckpt

inline void save_checkpoint(const IMPSState& s, const std::string& path) {
  using namespace detail_ckpt;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os.write("IMPS", 4);
  put_u32(os, 1);
  put_u32(os, 2);
  put_u32(os, static_cast<std::uint32_t>(s.weights[0].size()));
  put_u32(os, static_cast<std::uint32_t>(s.weights[1].size()));
  put_u32(os, 2);
  for (int site = 0; site < 2; ++site)
    for (int p = 0; p < 2; ++p) {
      const auto& m = s.gamma[site][p];
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          const double re = m(i, j).real(), im = m(i, j).imag();
          os.write(reinterpret_cast<const char*>(&re), 8);
          os.write(reinterpret_cast<const char*>(&im), 8);
        }
    }
  for (int b = 0; b < 2; ++b)
    os.write(reinterpret_cast<const char*>(s.weights[b].data()),
             static_cast<std::streamsize>(8 * s.weights[b].size()));
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline IMPSState load_checkpoint(const std::string& path) {
  using namespace detail_ckpt;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "IMPS", 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  const auto version = get_u32(is);
  if (version != 1) throw std::runtime_error("load_checkpoint: unsupported format version");
  const auto d = get_u32(is);
  const auto chi_odd = get_u32(is);
  const auto chi_even = get_u32(is);
  const auto cell = get_u32(is);
  if (d != 2 || cell != 2 || chi_odd == 0 || chi_even == 0)
    throw std::runtime_error("load_checkpoint: bad header");

  IMPSState s;
  s.chi_max = static_cast<int>(std::max(chi_odd, chi_even));
  const std::uint32_t rows[2] = {chi_even, chi_odd};
  const std::uint32_t cols[2] = {chi_odd, chi_even};
  for (int site = 0; site < 2; ++site)
    for (std::uint32_t p = 0; p < d; ++p) {
      Eigen::MatrixXcd m(rows[site], cols[site]);
      for (std::uint32_t i = 0; i < rows[site]; ++i)
        for (std::uint32_t j = 0; j < cols[site]; ++j) {
          double re = 0, im = 0;
          is.read(reinterpret_cast<char*>(&re), 8);
          is.read(reinterpret_cast<char*>(&im), 8);
          m(i, j) = cplx(re, im);
        }
      s.gamma[site][p] = std::move(m);
    }
  s.weights[0].resize(chi_odd);
  s.weights[1].resize(chi_even);
  for (int b = 0; b < 2; ++b)
    is.read(reinterpret_cast<char*>(s.weights[b].data()),
            static_cast<std::streamsize>(8 * s.weights[b].size()));
  if (!is) throw std::runtime_error("load_checkpoint: truncated file " + path);
  return s;
}

}  // namespace altchain::imps
