#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmsim/demapper.hpp"
#include "cmsim/fiber.hpp"

namespace cmsim {

enum class ChannelKind { awgn, fiber };

// FEC selection for a sweep. LDPC codes come from alist files; turbo codes
// are parameterized directly.
struct CodeSpec {
  std::string family = "ldpc";  // "ldpc" | "turbo"
  std::string alist_path;
  double rate = 0.5;            // turbo target rate (LDPC rate comes from H)
  int iterations = 0;           // 0 = family default (LDPC 50, turbo 10)
  std::uint64_t interleaver_seed = 7;  // turbo internal interleaver
  std::size_t info_bits = 20000;       // turbo block length
  std::string puncture_file;  // optional override of the built-in patterns
};

struct SweepSpec {
  ChannelKind channel = ChannelKind::awgn;
  std::string constellation = "qam16";
  LlrKind llr_kind = LlrKind::exact;
  CodeSpec codec;
  std::string sweep_variable = "rho_db";  // rho_db | distance_km |
                                          // launch_power_dbm
  double sweep_start = 0.0;
  double sweep_stop = 10.0;
  int sweep_points = 11;
  std::size_t frames_per_point = 64;   // codeword budget per point
  std::size_t min_bit_errors = 100;    // adaptive stopping rule
  double target_post_ber = 4.7e-3;
  std::uint64_t master_seed = 1;
  // pack codewords so the channel frame length divides the symbol size; when
  // off, a non-divisible codec/constellation pair is an error
  bool group_codewords = true;
  std::size_t mi_max_samples = 200000;
  std::string frame_dump_dir;  // when set, pooled LlrFrames are dumped here
  FiberParams fiber;

  std::vector<double> sweep_values() const;
  void validate() const;
};

struct SweepRow {
  double sweep_value = 0.0;
  double pre_ber = 0.0;
  double mi_norm = 0.0;   // I(X;Y)/m
  double gmi_norm = 0.0;  // GMI/m
  double s_star = 1.0;
  double post_ber = 0.0;
  double post_ber_ci_lo = 0.0;
  double post_ber_ci_hi = 0.0;
  std::size_t frames = 0;  // codewords decoded

  // not part of the CSV schema, kept for downstream analysis
  std::size_t info_bits = 0;
  double rho_effective = 0.0;  // linear SNR seen by the demapper
};

// Runs the full pipeline per sweep point: encode, interleave, map, channel,
// demap, deinterleave, decode. All predictors and the post-FEC BER use the
// same channel realizations. The rule for adaptive stopping consumes frames
// in fixed-size batches, so results are identical for any worker count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers = 1);

struct ThresholdCrossing {
  bool crossed = false;
  double sweep_value = 0.0;
  double pre_ber = 0.0;
  double mi_norm = 0.0;
  double gmi_norm = 0.0;
};

// Log-linear interpolation of post-FEC BER between the two rows bracketing
// the target; returns all predictor values at the crossing.
ThresholdCrossing find_threshold(std::span<const SweepRow> rows,
                                 double target);

// Same, after ordering rows by normalized GMI; useful for launch-power
// sweeps where the raw sweep order is not monotone in quality.
ThresholdCrossing find_threshold_by_gmi(std::span<const SweepRow> rows,
                                        double target);

struct ThresholdReport {
  struct Entry {
    std::string constellation;
    double rate = 0.0;
    ThresholdCrossing crossing;
  };
  std::vector<Entry> entries;
};

// max - min of each required predictor across the report's entries, plus the
// same spread relative to the metric's mean.
struct PredictorSpread {
  double pre_ber = 0.0;
  double mi_norm = 0.0;
  double gmi_norm = 0.0;
  double pre_ber_rel = 0.0;
  double mi_norm_rel = 0.0;
  double gmi_norm_rel = 0.0;
};
PredictorSpread prediction_spread(const ThresholdReport& report);

// JSON round trip for SweepSpec (mirrors the field names above; fiber
// parameters nest under "fiber").
SweepSpec parse_sweep_spec(const std::string& json_text);
std::string sweep_spec_to_json(const SweepSpec& spec);

}  // namespace cmsim
