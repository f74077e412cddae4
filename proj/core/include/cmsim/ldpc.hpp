#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cmsim/fec.hpp"

namespace cmsim {

// Binary LDPC code defined by a sparse parity-check matrix in alist format.
// Preprocessing derives a systematic encoder by Gaussian elimination; decode
// runs flooding sum-product belief propagation on the original H.
//
// L-value convention matches the demapper: positive means bit 1.
class LdpcCode {
 public:
  static LdpcCode load_alist(std::istream& in);
  static LdpcCode load_alist_file(const std::string& path);
  void write_alist(std::ostream& out) const;

  std::size_t n_code() const { return n_; }
  std::size_t k_info() const { return n_ - rows_; }
  double rate() const { return static_cast<double>(k_info()) / n_; }
  std::size_t n_checks() const { return rows_; }

  // info positions in the codeword (non-pivot columns of the elimination)
  const std::vector<std::uint32_t>& info_positions() const {
    return info_pos_;
  }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;

  // Sum-product decoding, flooding schedule, early stop on zero syndrome
  // unless strict is set. Non-convergence is reported, not an error.
  DecodeResult decode(std::span<const double> llrs, int max_iter = 50,
                      bool strict = false) const;

  bool syndrome_zero(std::span<const std::uint8_t> code_bits) const;

 private:
  void build_encoder();

  std::size_t n_ = 0;     // columns / code bits
  std::size_t rows_ = 0;  // checks; full rank is required
  std::vector<std::vector<std::uint32_t>> check_vars_;  // per check
  std::vector<std::vector<std::uint32_t>> var_checks_;  // per variable

  // encoder: parity[r] = XOR of gen_[r] over info bits (dense bit rows)
  std::vector<std::uint32_t> parity_pos_;
  std::vector<std::uint32_t> info_pos_;
  std::vector<std::vector<std::uint64_t>> gen_;  // [parity][info words]
};

}  // namespace cmsim
