#include "cmsim/fec.hpp"

#include <cmath>
#include <stdexcept>

namespace cmsim {

std::size_t score_result(DecodeResult& result,
                         std::span<const std::uint8_t> reference) {
  if (result.info_bits.size() != reference.size())
    throw std::invalid_argument("reference length mismatch");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < reference.size(); ++i)
    errors += (result.info_bits[i] & 1u) != (reference[i] & 1u);
  result.bit_errors = errors;
  return errors;
}

void wilson_interval(std::size_t errors, std::size_t trials, double* lo,
                     double* hi) {
  if (trials == 0) {
    *lo = *hi = 0.0;
    return;
  }
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  *lo = std::max(0.0, center - half);
  *hi = std::min(1.0, center + half);
}

PostFecStats post_fec_ber(std::span<DecodeResult> results,
                          std::span<const std::vector<std::uint8_t>>
                              reference_frames) {
  if (results.empty()) throw std::invalid_argument("no decode results");
  if (results.size() != reference_frames.size())
    throw std::invalid_argument("results/reference count mismatch");
  PostFecStats stats;
  stats.frames = results.size();
  for (std::size_t f = 0; f < results.size(); ++f) {
    stats.errors += score_result(results[f], reference_frames[f]);
    stats.bits += reference_frames[f].size();
  }
  stats.ber = static_cast<double>(stats.errors) /
              static_cast<double>(stats.bits);
  wilson_interval(stats.errors, stats.bits, &stats.ci_lo, &stats.ci_hi);
  return stats;
}

}  // namespace cmsim
