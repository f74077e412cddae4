#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmsim/constellation.hpp"
#include "cmsim/demapper.hpp"

namespace cmsim {

// Monte-Carlo rate estimate in bits per symbol. For GMI, value equals the sum
// of per_bit_terms and s_star is the optimized metric exponent (1 for exact
// L-values). std_err is the standard error of the per-sample log2 terms.
struct RateEstimate {
  double value = 0.0;
  std::vector<double> per_bit_terms;
  double s_star = 1.0;
  std::size_t n_samples = 0;
  double std_err = 0.0;
  bool s_at_boundary = false;
};

// MI of the AWGN channel with uniform inputs, estimated by reusing each noise
// draw against every constellation point. Requires n >= 1000.
RateEstimate estimate_mi_awgn(const Constellation& c, double rho,
                              std::size_t n, std::uint64_t seed);

// Same estimator on externally supplied noise realizations.
RateEstimate mi_awgn_from_noise(const Constellation& c, double rho,
                                std::span<const cplx> noise);

// MI estimate from matched (transmitted index, received sample) pairs under a
// Gaussian channel law with the given rho; used on measured channels.
RateEstimate mi_from_pairs(const Constellation& c, double rho,
                           std::span<const int> tx_index,
                           std::span<const cplx> rx);

// GMI of the frame's binary soft-output channel. Exact frames use s = 1;
// max-log frames minimize over s with a golden-section search.
RateEstimate estimate_gmi(const LlrFrame& frame);

// GMI objective m - (1/n) sum log2(1 + e^{s(-1)^c lambda}) at a fixed s.
double gmi_objective(const LlrFrame& frame, double s);

// Golden-section search for the maximizer of gmi_objective over
// s in [1e-3, 20], absolute tolerance 1e-4. Sets *at_boundary when the
// optimum sits at a bracket end.
double optimize_s(const LlrFrame& frame, bool* at_boundary = nullptr);

// Histogram estimate of the conditional PDF of symmetrized and mixed
// L-values f_{L|B}(l|1): samples contribute +lambda where the transmitted
// bit is 1 and -lambda where it is 0, pooled over bit positions. Bins cover
// [-kLlrMax, kLlrMax]; samples are clamped into range.
struct SymmetrizedPdf {
  double lo = -kLlrMax;
  double hi = kLlrMax;
  std::vector<double> density;  // integrates to 1
  std::size_t n_samples = 0;

  int bins() const { return static_cast<int>(density.size()); }
  double bin_width() const { return (hi - lo) / bins(); }
  double center(int i) const { return lo + (i + 0.5) * bin_width(); }
  double mass(int i) const { return density[i] * bin_width(); }
};

SymmetrizedPdf symmetrized_pdf(const LlrFrame& frame, int n_bins = 2000);

// Integral of the symmetrized PDF over (-inf, 0]; equals the pre-FEC BER up
// to one bin of probability mass. Linear within the bin straddling zero.
double ber_from_pdf(const SymmetrizedPdf& pdf);

// GMI = m * I(B;L) by numerical integration over the histogram, using the
// symmetry f(l|0) = f(-l|1). Valid for PDFs built from exact L-values only.
RateEstimate gmi_from_pdf(const SymmetrizedPdf& pdf, int m);

void dump_pdf_csv(std::ostream& out, const SymmetrizedPdf& pdf);

}  // namespace cmsim
