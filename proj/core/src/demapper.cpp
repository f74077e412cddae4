#include "cmsim/demapper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cmsim {

namespace {

double clamp_llr(double v) { return std::clamp(v, -kLlrMax, kLlrMax); }

// log sum_i exp(e_i) with the max subtracted first
double log_sum_exp(std::span<const double> e) {
  const double mx = *std::max_element(e.begin(), e.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : e) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

void LlrFrame::append(const LlrFrame& other) {
  if (m == 0) {
    *this = other;
    return;
  }
  if (other.m != m || other.kind != kind)
    throw std::invalid_argument("appending incompatible LlrFrame");
  llrs.insert(llrs.end(), other.llrs.begin(), other.llrs.end());
  bits.insert(bits.end(), other.bits.begin(), other.bits.end());
  n += other.n;
}

void llr_exact(cplx y, double rho, const Constellation& c,
               std::span<double> out) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  const int M = c.size();
  // one pass over the points, reused for every bit position
  thread_local std::vector<double> expo;
  expo.resize(M);
  for (int i = 0; i < M; ++i) expo[i] = -rho * std::norm(y - c.points[i]);

  thread_local std::vector<double> e0, e1;
  for (int k = 0; k < c.m; ++k) {
    e0.clear();
    e1.clear();
    for (int i : c.subsets[k][0]) e0.push_back(expo[i]);
    for (int i : c.subsets[k][1]) e1.push_back(expo[i]);
    out[k] = clamp_llr(log_sum_exp(e1) - log_sum_exp(e0));
  }
}

void llr_maxlog(cplx y, double rho, const Constellation& c,
                std::span<double> out) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  const int M = c.size();
  thread_local std::vector<double> d2;
  d2.resize(M);
  for (int i = 0; i < M; ++i) d2[i] = std::norm(y - c.points[i]);

  for (int k = 0; k < c.m; ++k) {
    double m0 = std::numeric_limits<double>::infinity();
    double m1 = m0;
    for (int i : c.subsets[k][0]) m0 = std::min(m0, d2[i]);
    for (int i : c.subsets[k][1]) m1 = std::min(m1, d2[i]);
    out[k] = clamp_llr(rho * (m0 - m1));
  }
}

std::vector<double> demap(std::span<const cplx> y, double rho,
                          const Constellation& c, LlrKind kind) {
  std::vector<double> llrs(y.size() * c.m);
  for (std::size_t l = 0; l < y.size(); ++l) {
    std::span<double> out{llrs.data() + l * c.m, static_cast<std::size_t>(c.m)};
    if (kind == LlrKind::exact)
      llr_exact(y[l], rho, c, out);
    else
      llr_maxlog(y[l], rho, c, out);
  }
  return llrs;
}

double pre_fec_ber(const LlrFrame& frame) {
  if (frame.empty()) throw std::invalid_argument("empty LlrFrame");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < frame.llrs.size(); ++i)
    errors += hard_decide(frame.llrs[i]) != (frame.bits[i] & 1u);
  return static_cast<double>(errors) / static_cast<double>(frame.llrs.size());
}

AwgnFrame simulate_awgn_frame(const Constellation& c, double rho,
                              std::size_t n_symbols, StreamRng& rng,
                              LlrKind kind) {
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  AwgnFrame out;
  out.frame.m = c.m;
  out.frame.n = n_symbols;
  out.frame.kind = kind;
  out.frame.bits.resize(n_symbols * c.m);
  out.frame.llrs.resize(n_symbols * c.m);
  out.noise.resize(n_symbols);
  out.tx_index.resize(n_symbols);

  const double noise_var = 1.0 / rho;
  for (std::size_t l = 0; l < n_symbols; ++l) {
    std::uint32_t lab = 0;
    for (int k = 0; k < c.m; ++k) {
      const std::uint8_t b = static_cast<std::uint8_t>(rng.bit());
      out.frame.bits[l * c.m + k] = b;
      lab = (lab << 1) | b;
    }
    const cplx x = c.points[c.label_to_index[lab]];
    out.tx_index[l] = c.label_to_index[lab];
    const cplx z = rng.complex_gaussian(noise_var);
    out.noise[l] = z;
    std::span<double> lv{out.frame.llrs.data() + l * c.m,
                         static_cast<std::size_t>(c.m)};
    if (kind == LlrKind::exact)
      llr_exact(x + z, rho, c, lv);
    else
      llr_maxlog(x + z, rho, c, lv);
  }
  return out;
}

void dump_llr_frame_csv(std::ostream& out, const LlrFrame& frame) {
  out << "k,l,bit,llr\n";
  char buf[96];
  for (std::size_t l = 0; l < frame.n; ++l) {
    for (int k = 0; k < frame.m; ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%d,%.17g\n", k, l,
                    static_cast<int>(frame.bit(k, l)), frame.llr(k, l));
      out << buf;
    }
  }
}

LlrFrame load_llr_frame_csv(std::istream& in) {
  LlrFrame frame;
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,l,bit,llr", 0) != 0)
    throw std::runtime_error("bad LlrFrame CSV header");
  struct Entry {
    int k;
    std::size_t l;
    int bit;
    double llr;
  };
  std::vector<Entry> entries;
  int max_k = -1;
  std::size_t max_l = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Entry e;
    if (std::sscanf(line.c_str(), "%d,%zu,%d,%lg", &e.k, &e.l, &e.bit,
                    &e.llr) != 4)
      throw std::runtime_error("bad LlrFrame CSV row: " + line);
    entries.push_back(e);
    max_k = std::max(max_k, e.k);
    max_l = std::max(max_l, e.l);
  }
  if (entries.empty()) throw std::runtime_error("empty LlrFrame CSV");
  frame.m = max_k + 1;
  frame.n = max_l + 1;
  frame.llrs.assign(frame.m * frame.n, 0.0);
  frame.bits.assign(frame.m * frame.n, 0);
  for (const Entry& e : entries) {
    frame.llrs[e.l * frame.m + e.k] = e.llr;
    frame.bits[e.l * frame.m + e.k] = static_cast<std::uint8_t>(e.bit);
  }
  return frame;
}

}  // namespace cmsim
