#pragma once

#include <complex>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace cmsim {

using cplx = std::complex<double>;

// M-ary constellation with a binary labeling. Points are normalized to unit
// average energy so that SNR rho = 1 / E[|noise|^2]. Immutable after
// construction; safe to share across threads.
struct Constellation {
  std::string name;
  int m = 0;                          // bits per symbol, M = 2^m
  std::vector<cplx> points;           // size M
  std::vector<std::uint32_t> labels;  // labels[i]: bit k at position m-1-k
  std::vector<int> label_to_index;    // inverse of labels, size M

  // subset[k][b]: indices of points whose label has bit value b at position k
  // (k = 0 is the first/most significant label bit). Each has M/2 entries.
  std::vector<std::array<std::vector<int>, 2>> subsets;

  // set for constellations built on a square grid; enables separable
  // per-quadrature computations
  bool square_grid = false;
  std::vector<double> pam_levels;  // per-dimension amplitude levels

  int size() const { return static_cast<int>(points.size()); }
  int label_bit(int point_index, int k) const {
    return (labels[point_index] >> (m - 1 - k)) & 1u;
  }
  double average_energy() const;
};

// Gray-mapped square QAM, M in {4, 16, 64, 256}. The first m/2 label bits
// select the in-phase level, the rest the quadrature level, each through a
// binary-reflected Gray code, so grid neighbors differ in exactly one bit.
Constellation build_square_qam(int M);

// Rectangular 8-point constellation (two rows of four) with a deliberately
// non-Gray labeling; stands in for externally defined 8QAM geometries, which
// can be supplied through load_constellation instead.
Constellation build_8qam();

// Text format: one row per point, "label_bits re im", '#' starts a comment,
// row order defines the point index. Input is re-normalized to unit average
// energy; *renormalized is set when the input energy was off by > 1e-6.
Constellation load_constellation(std::istream& in, const std::string& name,
                                 bool* renormalized = nullptr);
Constellation load_constellation_file(const std::string& path,
                                      bool* renormalized = nullptr);
void write_constellation(std::ostream& out, const Constellation& c);

// Resolves "qam4", "qam8", ..., "qam256" to builders, anything else to a file
// path.
Constellation make_constellation(const std::string& id);

// bits.size() must be a multiple of m; bits [l*m, (l+1)*m) select symbol l.
std::vector<cplx> map_bits(std::span<const std::uint8_t> bits,
                           const Constellation& c);

// Same mapping, returning point indices instead of complex values.
std::vector<int> map_bits_to_indices(std::span<const std::uint8_t> bits,
                                     const Constellation& c);

}  // namespace cmsim
