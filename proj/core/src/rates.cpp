#include "cmsim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cmsim/rng.hpp"

namespace cmsim {

namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1/ln 2

// log2(1 + e^u), stable for large |u|
double log2_1p_exp(double u) {
  if (u > 0.0) return (u + std::log1p(std::exp(-u))) * kLog2e;
  return std::log1p(std::exp(u)) * kLog2e;
}

struct MeanVar {
  double mean = 0.0;
  double std_err = 0.0;
};

MeanVar mean_and_stderr(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  MeanVar out;
  out.mean = mean;
  out.std_err = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return out;
}

// per-sample value of (1/M) sum_i log2 f_{i,l} for a square grid, using the
// per-quadrature factorization of the Gaussian kernel
double grid_log2f_sample(const std::vector<double>& levels, double rho,
                         cplx z) {
  const int P = static_cast<int>(levels.size());
  double acc = 0.0;
  for (int dim = 0; dim < 2; ++dim) {
    const double zd = dim == 0 ? z.real() : z.imag();
    double dim_sum = 0.0;
    for (int i = 0; i < P; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      double es[32];
      for (int j = 0; j < P; ++j) {
        const double d = levels[i] - levels[j];
        es[j] = -rho * (d * d + 2.0 * d * zd);
        mx = std::max(mx, es[j]);
      }
      double s = 0.0;
      for (int j = 0; j < P; ++j) s += std::exp(es[j] - mx);
      dim_sum += (mx + std::log(s)) * kLog2e;
    }
    acc += dim_sum / P;
  }
  return acc;
}

double generic_log2f_sample(const Constellation& c, double rho, cplx z) {
  const int M = c.size();
  double acc = 0.0;
  for (int i = 0; i < M; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> es;
    es.resize(M);
    for (int j = 0; j < M; ++j) {
      const cplx d = c.points[i] - c.points[j];
      es[j] = -rho * (std::norm(d) + 2.0 * (d.real() * z.real() +
                                            d.imag() * z.imag()));
      mx = std::max(mx, es[j]);
    }
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += std::exp(es[j] - mx);
    acc += (mx + std::log(s)) * kLog2e;
  }
  return acc / M;
}

}  // namespace

RateEstimate mi_awgn_from_noise(const Constellation& c, double rho,
                                std::span<const cplx> noise) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (noise.empty()) throw std::invalid_argument("no noise samples");
  const double log2M = c.m;
  std::vector<double> per_sample(noise.size());
  for (std::size_t l = 0; l < noise.size(); ++l) {
    const double lf = c.square_grid
                          ? grid_log2f_sample(c.pam_levels, rho, noise[l])
                          : generic_log2f_sample(c, rho, noise[l]);
    per_sample[l] = log2M - lf;
  }
  const MeanVar mv = mean_and_stderr(per_sample);
  RateEstimate est;
  est.value = mv.mean;
  est.std_err = mv.std_err;
  est.n_samples = noise.size();
  return est;
}

RateEstimate estimate_mi_awgn(const Constellation& c, double rho,
                              std::size_t n, std::uint64_t seed) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (n < 1000) throw std::invalid_argument("need at least 1000 samples");
  StreamRng rng(seed);
  std::vector<cplx> z(n);
  for (cplx& v : z) v = rng.complex_gaussian(1.0 / rho);
  return mi_awgn_from_noise(c, rho, z);
}

RateEstimate mi_from_pairs(const Constellation& c, double rho,
                           std::span<const int> tx_index,
                           std::span<const cplx> rx) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  if (tx_index.size() != rx.size() || rx.empty())
    throw std::invalid_argument("tx/rx size mismatch");
  const int M = c.size();
  std::vector<double> per_sample(rx.size());
  thread_local std::vector<double> es;
  es.resize(M);
  for (std::size_t l = 0; l < rx.size(); ++l) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < M; ++j) {
      es[j] = -rho * std::norm(rx[l] - c.points[j]);
      mx = std::max(mx, es[j]);
    }
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += std::exp(es[j] - mx);
    const double log2_fy = (mx + std::log(s)) * kLog2e - c.m;  // + const
    const double log2_fyx = es[tx_index[l]] * kLog2e;
    per_sample[l] = log2_fyx - log2_fy;
  }
  const MeanVar mv = mean_and_stderr(per_sample);
  RateEstimate est;
  est.value = mv.mean;
  est.std_err = mv.std_err;
  est.n_samples = rx.size();
  return est;
}

double gmi_objective(const LlrFrame& frame, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < frame.llrs.size(); ++i) {
    const double sign = frame.bits[i] ? -1.0 : 1.0;
    acc += log2_1p_exp(s * sign * frame.llrs[i]);
  }
  return frame.m - acc / static_cast<double>(frame.n);
}

double optimize_s(const LlrFrame& frame, bool* at_boundary) {
  if (frame.empty()) throw std::invalid_argument("empty LlrFrame");
  constexpr double kLo = 1e-3, kHi = 20.0, kTol = 1e-4;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLo, b = kHi;
  double c1 = b - inv_phi * (b - a);
  double c2 = a + inv_phi * (b - a);
  double f1 = gmi_objective(frame, c1);
  double f2 = gmi_objective(frame, c2);
  while (b - a > kTol) {
    if (f1 >= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - inv_phi * (b - a);
      f1 = gmi_objective(frame, c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + inv_phi * (b - a);
      f2 = gmi_objective(frame, c2);
    }
  }
  const double s = 0.5 * (a + b);
  if (at_boundary)
    *at_boundary = (s - kLo < 2.0 * kTol) || (kHi - s < 2.0 * kTol);
  return s;
}

RateEstimate estimate_gmi(const LlrFrame& frame) {
  if (frame.empty()) throw std::invalid_argument("empty LlrFrame");
  for (std::uint8_t b : frame.bits)
    if (b > 1) throw std::invalid_argument("non-binary bits in LlrFrame");

  RateEstimate est;
  if (frame.kind == LlrKind::exact) {
    est.s_star = 1.0;
  } else {
    est.s_star = optimize_s(frame, &est.s_at_boundary);
  }

  est.per_bit_terms.assign(frame.m, 1.0);
  std::vector<double> per_symbol(frame.n, 0.0);
  for (std::size_t l = 0; l < frame.n; ++l) {
    double t = 0.0;
    for (int k = 0; k < frame.m; ++k) {
      const double sign = frame.bit(k, l) ? -1.0 : 1.0;
      const double term = log2_1p_exp(est.s_star * sign * frame.llr(k, l));
      est.per_bit_terms[k] -= term / static_cast<double>(frame.n);
      t += term;
    }
    per_symbol[l] = t;
  }
  const MeanVar mv = mean_and_stderr(per_symbol);
  est.value = std::accumulate(est.per_bit_terms.begin(),
                              est.per_bit_terms.end(), 0.0);
  est.std_err = mv.std_err;
  est.n_samples = frame.n;
  return est;
}

SymmetrizedPdf symmetrized_pdf(const LlrFrame& frame, int n_bins) {
  if (frame.empty()) throw std::invalid_argument("empty LlrFrame");
  if (n_bins < 2) throw std::invalid_argument("need at least 2 bins");
  SymmetrizedPdf pdf;
  pdf.density.assign(n_bins, 0.0);
  const double width = pdf.bin_width();
  for (std::size_t i = 0; i < frame.llrs.size(); ++i) {
    const double v = frame.bits[i] ? frame.llrs[i] : -frame.llrs[i];
    const double x = std::clamp(v, pdf.lo, pdf.hi);
    int bin = static_cast<int>((x - pdf.lo) / width);
    bin = std::clamp(bin, 0, n_bins - 1);
    pdf.density[bin] += 1.0;
  }
  pdf.n_samples = frame.llrs.size();
  const double norm = 1.0 / (static_cast<double>(pdf.n_samples) * width);
  for (double& d : pdf.density) d *= norm;
  return pdf;
}

double ber_from_pdf(const SymmetrizedPdf& pdf) {
  const double width = pdf.bin_width();
  double mass = 0.0;
  for (int i = 0; i < pdf.bins(); ++i) {
    const double lo = pdf.lo + i * width;
    const double hi = lo + width;
    if (hi <= 0.0) {
      mass += pdf.density[i] * width;
    } else if (lo < 0.0) {
      mass += pdf.density[i] * (0.0 - lo);
    }
  }
  return mass;
}

RateEstimate gmi_from_pdf(const SymmetrizedPdf& pdf, int m) {
  if (pdf.lo != -pdf.hi)
    throw std::invalid_argument("pdf range must be symmetric about zero");
  double total = 0.0;
  for (int i = 0; i < pdf.bins(); ++i) total += pdf.mass(i);
  if (total <= 0.0) throw std::invalid_argument("degenerate pdf");

  // I(B;L) = integral f(l|1) log2( 2 f(l|1) / (f(l|1) + f(-l|1)) ) dl,
  // with the mirror bin of i being bins-1-i on the symmetric range
  double info = 0.0;
  for (int i = 0; i < pdf.bins(); ++i) {
    const double w = pdf.mass(i) / total;
    if (w <= 0.0) continue;
    const double wm = pdf.mass(pdf.bins() - 1 - i) / total;
    info += w * std::log2(2.0 * w / (w + wm));
  }
  RateEstimate est;
  est.value = m * info;
  est.s_star = 1.0;
  est.n_samples = pdf.n_samples;
  return est;
}

void dump_pdf_csv(std::ostream& out, const SymmetrizedPdf& pdf) {
  out << "bin_center,density\n";
  char buf[80];
  for (int i = 0; i < pdf.bins(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", pdf.center(i),
                  pdf.density[i]);
    out << buf;
  }
}

}  // namespace cmsim
