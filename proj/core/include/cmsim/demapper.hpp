#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmsim/constellation.hpp"
#include "cmsim/rng.hpp"

namespace cmsim {

// L-values are natural-log likelihood ratios log f(y|1)/f(y|0); positive sign
// means bit 1. Magnitudes are clamped to kLlrMax.
constexpr double kLlrMax = 50.0;

enum class LlrKind { exact, maxlog };

// m x n matrix of L-values together with the code bits they were computed
// for. Layout is symbol-major: entry (k, l) lives at index l*m + k.
struct LlrFrame {
  int m = 0;
  std::size_t n = 0;
  LlrKind kind = LlrKind::exact;
  std::vector<double> llrs;
  std::vector<std::uint8_t> bits;

  // a-priori L-value; input bits are uniform throughout, so this stays zero
  double apriori = 0.0;

  double llr(int k, std::size_t l) const { return llrs[l * m + k]; }
  std::uint8_t bit(int k, std::size_t l) const { return bits[l * m + k]; }
  std::size_t total_bits() const { return llrs.size(); }
  bool empty() const { return llrs.empty(); }
  void append(const LlrFrame& other);
};

// Exact per-bit L-values for y observed on an AWGN channel with SNR rho:
//   L_k = log sum_{x in X_k^1} e^{-rho|y-x|^2} - log sum_{x in X_k^0} ...
// evaluated with max-subtracted log-sum-exp and clamped to +-kLlrMax.
void llr_exact(cplx y, double rho, const Constellation& c,
               std::span<double> out);

// Max-log approximation L_k = rho(min_{X_k^0}|y-x|^2 - min_{X_k^1}|y-x|^2).
void llr_maxlog(cplx y, double rho, const Constellation& c,
                std::span<double> out);

// Batch demap; returns m L-values per symbol in symbol-major layout.
std::vector<double> demap(std::span<const cplx> y, double rho,
                          const Constellation& c, LlrKind kind);

// MAP hard decision on an a-posteriori L-value (ties decide 1).
inline std::uint8_t hard_decide(double llr_apo) { return llr_apo >= 0.0; }

// Fraction of entries whose hard decision differs from the transmitted bit.
// With uniform priors the channel L-values are the a-posteriori ones.
double pre_fec_ber(const LlrFrame& frame);

// Draws uniform bits, maps, adds complex Gaussian noise of variance 1/rho and
// demaps with the true rho. Returned noise samples allow rate estimates on
// the same realizations.
struct AwgnFrame {
  LlrFrame frame;
  std::vector<cplx> noise;      // z(l) = y(l) - x(l)
  std::vector<int> tx_index;    // transmitted point index per symbol
};
AwgnFrame simulate_awgn_frame(const Constellation& c, double rho,
                              std::size_t n_symbols, StreamRng& rng,
                              LlrKind kind);

// CSV dump/load, columns k,l,bit,llr. Doubles are printed exactly
// round-trippable.
void dump_llr_frame_csv(std::ostream& out, const LlrFrame& frame);
LlrFrame load_llr_frame_csv(std::istream& in);

}  // namespace cmsim
