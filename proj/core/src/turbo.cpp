#include "cmsim/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "cmsim/demapper.hpp"
#include "cmsim/interleaver.hpp"

namespace cmsim {

namespace {
constexpr double kNegInf = -1e300;
}

RscTrellis::RscTrellis() {
  for (int s = 0; s < kStates; ++s) {
    const int a1 = s & 1, a2 = (s >> 1) & 1, a3 = (s >> 2) & 1;
    for (int u = 0; u < 2; ++u) {
      const int at = u ^ a1 ^ a3;           // feedback 1 + D + D^3
      parity[s][u] = static_cast<std::uint8_t>(at ^ a3);  // feedforward 1 + D^3
      next[s][u] = static_cast<std::uint8_t>(at | (a1 << 1) | (a2 << 2));
    }
    tail_input[s] = static_cast<std::uint8_t>(a1 ^ a3);
  }
}

PuncturePattern PuncturePattern::for_rate(double rate) {
  struct Entry {
    double rate;
    std::vector<std::uint8_t> p1, p2;
  };
  static const std::vector<Entry> table = {
      {1.0 / 3.0, {1}, {1}},
      {2.0 / 5.0, {1}, {1, 0}},
      {1.0 / 2.0, {1, 0}, {0, 1}},
      {3.0 / 5.0, {1, 0, 0}, {0, 1, 0}},
      {2.0 / 3.0, {1, 0, 0, 0}, {0, 0, 1, 0}},
      {3.0 / 4.0, {1, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}},
      {5.0 / 6.0,
       {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
       {0, 0, 0, 0, 0, 1, 0, 0, 0, 0}},
  };
  for (const Entry& e : table)
    if (std::abs(e.rate - rate) < 1e-9) return {e.p1, e.p2};
  throw std::invalid_argument("unsupported turbo code rate");
}

PuncturePattern PuncturePattern::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open puncture pattern: " + path);
  PuncturePattern pat;
  std::string line;
  for (auto* mask : {&pat.p1, &pat.p2}) {
    if (!std::getline(in, line))
      throw std::runtime_error("puncture pattern: missing stream mask");
    for (char ch : line) {
      if (ch == '0' || ch == '1')
        mask->push_back(static_cast<std::uint8_t>(ch - '0'));
      else if (!std::isspace(static_cast<unsigned char>(ch)))
        throw std::runtime_error("puncture pattern: bad character");
    }
    if (mask->empty()) throw std::runtime_error("puncture pattern: empty mask");
  }
  return pat;
}

std::vector<double> rsc_maxlog_bcjr(const RscTrellis& trellis,
                                    std::span<const double> sys_plus_apriori,
                                    std::span<const double> parity,
                                    std::size_t n_info, bool terminated) {
  const std::size_t T = sys_plus_apriori.size();
  if (parity.size() != T || n_info > T)
    throw std::invalid_argument("bcjr input length mismatch");
  constexpr int S = RscTrellis::kStates;

  std::vector<std::array<double, S>> alpha(T + 1), beta(T + 1);
  alpha[0].fill(kNegInf);
  alpha[0][0] = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    alpha[t + 1].fill(kNegInf);
    for (int s = 0; s < S; ++s) {
      if (alpha[t][s] == kNegInf) continue;
      for (int u = 0; u < 2; ++u) {
        const double g = (u ? sys_plus_apriori[t] : 0.0) +
                         (trellis.parity[s][u] ? parity[t] : 0.0);
        const int ns = trellis.next[s][u];
        alpha[t + 1][ns] = std::max(alpha[t + 1][ns], alpha[t][s] + g);
      }
    }
  }

  if (terminated) {
    beta[T].fill(kNegInf);
    beta[T][0] = 0.0;
  } else {
    beta[T].fill(0.0);
  }
  for (std::size_t t = T; t > 0; --t) {
    beta[t - 1].fill(kNegInf);
    for (int s = 0; s < S; ++s) {
      for (int u = 0; u < 2; ++u) {
        const double g = (u ? sys_plus_apriori[t - 1] : 0.0) +
                         (trellis.parity[s][u] ? parity[t - 1] : 0.0);
        const double v = g + beta[t][trellis.next[s][u]];
        beta[t - 1][s] = std::max(beta[t - 1][s], v);
      }
    }
  }

  std::vector<double> apo(n_info);
  for (std::size_t t = 0; t < n_info; ++t) {
    double m0 = kNegInf, m1 = kNegInf;
    for (int s = 0; s < S; ++s) {
      if (alpha[t][s] == kNegInf) continue;
      for (int u = 0; u < 2; ++u) {
        const double g = (u ? sys_plus_apriori[t] : 0.0) +
                         (trellis.parity[s][u] ? parity[t] : 0.0);
        const double v = alpha[t][s] + g + beta[t + 1][trellis.next[s][u]];
        (u ? m1 : m0) = std::max(u ? m1 : m0, v);
      }
    }
    apo[t] = m1 - m0;
  }
  return apo;
}

TurboCode::TurboCode(std::size_t info_bits, double rate,
                     std::uint64_t interleaver_seed, int iterations)
    : TurboCode(info_bits, rate, interleaver_seed,
                PuncturePattern::for_rate(rate), iterations) {}

TurboCode::TurboCode(std::size_t info_bits, double rate,
                     std::uint64_t interleaver_seed, PuncturePattern pattern,
                     int iterations)
    : k_(info_bits), rate_(rate), iterations_(iterations),
      pattern_(std::move(pattern)) {
  if (k_ == 0) throw std::invalid_argument("empty info block");
  interleaver_ = make_permutation(k_, interleaver_seed).forward;

  kept_positions_.clear();
  for (std::size_t t = 0; t < k_; ++t) {
    kept_positions_.push_back(static_cast<std::uint32_t>(3 * t));
    if (pattern_.p1[t % pattern_.p1.size()])
      kept_positions_.push_back(static_cast<std::uint32_t>(3 * t + 1));
    if (pattern_.p2[t % pattern_.p2.size()])
      kept_positions_.push_back(static_cast<std::uint32_t>(3 * t + 2));
  }
  for (std::size_t i = 0; i < 6; ++i)
    kept_positions_.push_back(static_cast<std::uint32_t>(3 * k_ + i));
  n_punctured_ = kept_positions_.size();
}

std::vector<std::uint8_t> TurboCode::encode(
    std::span<const std::uint8_t> info) const {
  if (info.size() != k_) throw std::invalid_argument("info length mismatch");

  std::vector<std::uint8_t> full(full_length(), 0);
  int s1 = 0, s2 = 0;
  for (std::size_t t = 0; t < k_; ++t) {
    const int u1 = info[t] & 1;
    full[3 * t] = static_cast<std::uint8_t>(u1);
    full[3 * t + 1] = trellis_.parity[s1][u1];
    s1 = trellis_.next[s1][u1];
    const int u2 = info[interleaver_[t]] & 1;
    full[3 * t + 2] = trellis_.parity[s2][u2];
    s2 = trellis_.next[s2][u2];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const int u = trellis_.tail_input[s1];
    full[3 * k_ + 2 * i] = static_cast<std::uint8_t>(u);
    full[3 * k_ + 2 * i + 1] = trellis_.parity[s1][u];
    s1 = trellis_.next[s1][u];
  }

  std::vector<std::uint8_t> out(n_punctured_);
  for (std::size_t i = 0; i < n_punctured_; ++i)
    out[i] = full[kept_positions_[i]];
  return out;
}

std::vector<double> TurboCode::depuncture(
    std::span<const double> llrs) const {
  if (llrs.size() != n_punctured_)
    throw std::invalid_argument("punctured length mismatch");
  std::vector<double> full(full_length(), 0.0);
  for (std::size_t i = 0; i < n_punctured_; ++i)
    full[kept_positions_[i]] = llrs[i];
  return full;
}

std::vector<double> TurboCode::puncture_llrs(
    std::span<const double> full) const {
  if (full.size() != full_length())
    throw std::invalid_argument("full length mismatch");
  std::vector<double> out(n_punctured_);
  for (std::size_t i = 0; i < n_punctured_; ++i)
    out[i] = full[kept_positions_[i]];
  return out;
}

DecodeResult TurboCode::decode(std::span<const double> llrs,
                               TurboTrace* trace) const {
  if (llrs.size() != full_length())
    throw std::invalid_argument("expected depunctured llrs");

  std::vector<double> sys(k_ + 3), p1(k_ + 3), p2(k_);
  for (std::size_t t = 0; t < k_; ++t) {
    sys[t] = llrs[3 * t];
    p1[t] = llrs[3 * t + 1];
    p2[t] = llrs[3 * t + 2];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    sys[k_ + i] = llrs[3 * k_ + 2 * i];
    p1[k_ + i] = llrs[3 * k_ + 2 * i + 1];
  }

  std::vector<double> la1(k_, 0.0), la2(k_, 0.0);
  std::vector<double> in1(k_ + 3), in2(k_);
  std::vector<double> apo1, apo2;
  for (int iter = 0; iter < iterations_; ++iter) {
    for (std::size_t t = 0; t < k_; ++t) in1[t] = sys[t] + la1[t];
    for (std::size_t i = 0; i < 3; ++i) in1[k_ + i] = sys[k_ + i];
    apo1 = rsc_maxlog_bcjr(trellis_, in1, p1, k_, true);

    for (std::size_t t = 0; t < k_; ++t) {
      const double extr = apo1[t] - in1[t];
      la2[t] = kExtrinsicScale * extr;
      if (trace && iter == 0) {
        trace->extrinsic_raw.push_back(extr);
        trace->extrinsic_scaled.push_back(la2[t]);
      }
    }

    for (std::size_t t = 0; t < k_; ++t)
      in2[t] = sys[interleaver_[t]] + la2[interleaver_[t]];
    apo2 = rsc_maxlog_bcjr(trellis_, in2, p2, k_, false);

    for (std::size_t t = 0; t < k_; ++t)
      la1[interleaver_[t]] = kExtrinsicScale * (apo2[t] - in2[t]);
  }

  DecodeResult result;
  result.iterations = iterations_;
  result.info_bits.resize(k_);
  std::vector<std::uint8_t> d1(k_);
  for (std::size_t t = 0; t < k_; ++t) {
    result.info_bits[interleaver_[t]] = hard_decide(apo2[t]);
    d1[t] = hard_decide(apo1[t]);
  }
  result.converged = std::equal(d1.begin(), d1.end(),
                                result.info_bits.begin());
  return result;
}

}  // namespace cmsim
