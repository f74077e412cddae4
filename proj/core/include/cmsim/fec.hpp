#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cmsim {

// Outcome of one soft-decision decode.
struct DecodeResult {
  std::vector<std::uint8_t> info_bits;
  // full code-bit decisions where the decoder produces them (LDPC)
  std::vector<std::uint8_t> code_bits;
  int iterations = 0;
  bool converged = false;
  // errors against the transmitted info bits; filled by score_result
  std::size_t bit_errors = 0;
};

std::size_t score_result(DecodeResult& result,
                         std::span<const std::uint8_t> reference);

struct PostFecStats {
  double ber = 0.0;
  double ci_lo = 0.0;  // 95% binomial (Wilson) interval
  double ci_hi = 0.0;
  std::size_t frames = 0;
  std::size_t errors = 0;
  std::size_t bits = 0;
};

// Pools already-scored results; reference_frames must parallel results.
PostFecStats post_fec_ber(std::span<DecodeResult> results,
                          std::span<const std::vector<std::uint8_t>>
                              reference_frames);

// Wilson 95% score interval for e errors in n trials.
void wilson_interval(std::size_t errors, std::size_t trials, double* lo,
                     double* hi);

}  // namespace cmsim
