#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmsim/fec.hpp"

namespace cmsim {

// Rate-1/2 recursive systematic convolutional code with generators
// (1, 11/15) in octal: feedback 1 + D + D^3, feedforward 1 + D^3, 8 states.
struct RscTrellis {
  static constexpr int kStates = 8;
  // next[state][input], parity[state][input]
  std::array<std::array<std::uint8_t, 2>, kStates> next{};
  std::array<std::array<std::uint8_t, 2>, kStates> parity{};
  // input that drives the register toward zero (used for termination)
  std::array<std::uint8_t, kStates> tail_input{};

  RscTrellis();
};

// Per-stream cyclic puncturing mask; systematic bits are never punctured.
struct PuncturePattern {
  std::vector<std::uint8_t> p1;  // keep-mask for encoder 1 parity
  std::vector<std::uint8_t> p2;  // keep-mask for encoder 2 parity

  static PuncturePattern for_rate(double rate);
  static PuncturePattern load_file(const std::string& path);
};

// Max-log posterior L-values of a single terminated/unterminated RSC block;
// exposed separately so the component decoder can be checked on its own.
// Inputs are (systematic + a-priori) and parity L-values per trellis step;
// termination steps carry no a-priori. Returns a-posteriori input L-values
// for the first n_info steps.
std::vector<double> rsc_maxlog_bcjr(const RscTrellis& trellis,
                                    std::span<const double> sys_plus_apriori,
                                    std::span<const double> parity,
                                    std::size_t n_info, bool terminated);

// Captures the extrinsic exchange of the first half-iteration for tests.
struct TurboTrace {
  std::vector<double> extrinsic_raw;     // decoder 1 output, iteration 1
  std::vector<double> extrinsic_scaled;  // what decoder 2 received a-priori
};

// Parallel concatenation of two identical RSC encoders separated by a seeded
// internal interleaver. Encoder 1 is terminated with 3 tail pairs; encoder 2
// is left open. Parity streams are cyclically punctured to the target rate
// out of {1/3, 2/5, 1/2, 3/5, 2/3, 3/4, 5/6}.
class TurboCode {
 public:
  TurboCode(std::size_t info_bits, double rate, std::uint64_t interleaver_seed,
            int iterations = 10);
  TurboCode(std::size_t info_bits, double rate, std::uint64_t interleaver_seed,
            PuncturePattern pattern, int iterations);

  std::size_t k_info() const { return k_; }
  // transmitted bits per frame, including tail pairs
  std::size_t n_code() const { return n_punctured_; }
  // rate of the punctured stream, tail excluded
  double rate() const { return rate_; }
  int iterations() const { return iterations_; }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;

  // maps n_code() transmitted L-values onto the unpunctured layout, zeros at
  // punctured positions
  std::vector<double> depuncture(std::span<const double> llrs) const;
  std::vector<double> puncture_llrs(std::span<const double> full) const;

  // llrs must be depunctured (length 3*k + 6). Max-log-MAP component
  // decoders exchange extrinsic L-values scaled by 0.7.
  DecodeResult decode(std::span<const double> llrs,
                      TurboTrace* trace = nullptr) const;

  static constexpr double kExtrinsicScale = 0.7;

 private:
  std::size_t full_length() const { return 3 * k_ + 6; }

  std::size_t k_;
  double rate_;
  int iterations_;
  RscTrellis trellis_;
  std::vector<std::uint32_t> interleaver_;  // info permutation
  PuncturePattern pattern_;
  // survivor map: position in unpunctured frame for each transmitted bit
  std::vector<std::uint32_t> kept_positions_;
  std::size_t n_punctured_ = 0;
};

}  // namespace cmsim
