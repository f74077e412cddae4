#include "cmsim/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cmsim/demapper.hpp"

namespace cmsim {

namespace {

std::vector<long long> read_tokens(std::istream& in) {
  std::vector<long long> tok;
  long long v;
  while (in >> v) tok.push_back(v);
  return tok;
}

}  // namespace

LdpcCode LdpcCode::load_alist(std::istream& in) {
  const std::vector<long long> tok = read_tokens(in);
  std::size_t pos = 0;
  auto next = [&]() -> long long {
    if (pos >= tok.size()) throw std::runtime_error("alist: truncated file");
    return tok[pos++];
  };

  LdpcCode code;
  const long long n = next();
  const long long m = next();
  if (n <= 0 || m <= 0 || m >= n)
    throw std::runtime_error("alist: bad dimensions");
  code.n_ = static_cast<std::size_t>(n);
  code.rows_ = static_cast<std::size_t>(m);
  const long long max_col = next();
  const long long max_row = next();

  std::vector<long long> col_w(n), row_w(m);
  for (auto& w : col_w) w = next();
  for (auto& w : row_w) w = next();
  if (*std::max_element(col_w.begin(), col_w.end()) != max_col ||
      *std::max_element(row_w.begin(), row_w.end()) != max_row)
    throw std::runtime_error("alist: weight header mismatch");

  code.var_checks_.assign(n, {});
  for (long long c = 0; c < n; ++c) {
    for (long long j = 0; j < max_col; ++j) {
      const long long r = next();
      if (j < col_w[c]) {
        if (r < 1 || r > m) throw std::runtime_error("alist: row index range");
        code.var_checks_[c].push_back(static_cast<std::uint32_t>(r - 1));
      } else if (r != 0) {
        throw std::runtime_error("alist: expected zero padding");
      }
    }
  }
  code.check_vars_.assign(m, {});
  for (long long r = 0; r < m; ++r) {
    for (long long j = 0; j < max_row; ++j) {
      const long long c = next();
      if (j < row_w[r]) {
        if (c < 1 || c > n) throw std::runtime_error("alist: col index range");
        code.check_vars_[r].push_back(static_cast<std::uint32_t>(c - 1));
      } else if (c != 0) {
        throw std::runtime_error("alist: expected zero padding");
      }
    }
  }
  if (pos != tok.size()) throw std::runtime_error("alist: trailing tokens");

  // cross-validate the two adjacency lists
  for (std::size_t r = 0; r < code.rows_; ++r)
    for (std::uint32_t c : code.check_vars_[r])
      if (std::find(code.var_checks_[c].begin(), code.var_checks_[c].end(),
                    static_cast<std::uint32_t>(r)) ==
          code.var_checks_[c].end())
        throw std::runtime_error("alist: inconsistent adjacency");

  code.build_encoder();
  return code;
}

LdpcCode LdpcCode::load_alist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open alist file: " + path);
  return load_alist(in);
}

void LdpcCode::write_alist(std::ostream& out) const {
  std::size_t max_col = 0, max_row = 0;
  for (const auto& v : var_checks_) max_col = std::max(max_col, v.size());
  for (const auto& r : check_vars_) max_row = std::max(max_row, r.size());

  auto line = [&out](const std::vector<long long>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) out << ' ';
      out << vals[i];
    }
    out << '\n';
  };

  line({static_cast<long long>(n_), static_cast<long long>(rows_)});
  line({static_cast<long long>(max_col), static_cast<long long>(max_row)});
  std::vector<long long> w;
  for (const auto& v : var_checks_) w.push_back(v.size());
  line(w);
  w.clear();
  for (const auto& r : check_vars_) w.push_back(r.size());
  line(w);
  for (const auto& v : var_checks_) {
    w.clear();
    for (std::uint32_t r : v) w.push_back(r + 1);
    w.resize(max_col, 0);
    line(w);
  }
  for (const auto& r : check_vars_) {
    w.clear();
    for (std::uint32_t c : r) w.push_back(c + 1);
    w.resize(max_row, 0);
    line(w);
  }
}

void LdpcCode::build_encoder() {
  const std::size_t words = (n_ + 63) / 64;
  std::vector<std::vector<std::uint64_t>> mat(rows_,
                                              std::vector<std::uint64_t>(words));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::uint32_t c : check_vars_[r]) mat[r][c / 64] ^= 1ULL << (c % 64);

  auto get = [&](std::size_t r, std::size_t c) {
    return (mat[r][c / 64] >> (c % 64)) & 1ULL;
  };

  // eliminate choosing pivots from the last column backwards, which keeps
  // accumulator-style codes systematic in their leading positions
  std::vector<std::uint32_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t ci = 0; ci < n_ && r < rows_; ++ci) {
    const std::size_t c = n_ - 1 - ci;
    std::size_t pr = r;
    while (pr < rows_ && !get(pr, c)) ++pr;
    if (pr == rows_) continue;
    std::swap(mat[r], mat[pr]);
    for (std::size_t rr = 0; rr < rows_; ++rr) {
      if (rr != r && get(rr, c))
        for (std::size_t wI = 0; wI < words; ++wI) mat[rr][wI] ^= mat[r][wI];
    }
    pivot_col.push_back(static_cast<std::uint32_t>(c));
    ++r;
  }
  if (r < rows_)
    throw std::runtime_error("parity-check matrix is rank deficient");

  std::vector<bool> is_pivot(n_, false);
  for (std::uint32_t c : pivot_col) is_pivot[c] = true;
  info_pos_.clear();
  for (std::size_t c = 0; c < n_; ++c)
    if (!is_pivot[c]) info_pos_.push_back(static_cast<std::uint32_t>(c));
  parity_pos_ = pivot_col;

  const std::size_t k = info_pos_.size();
  const std::size_t kwords = (k + 63) / 64;
  gen_.assign(rows_, std::vector<std::uint64_t>(kwords));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (get(i, info_pos_[j])) gen_[i][j / 64] ^= 1ULL << (j % 64);
}

std::vector<std::uint8_t> LdpcCode::encode(
    std::span<const std::uint8_t> info) const {
  if (info.size() != k_info())
    throw std::invalid_argument("info length mismatch");
  const std::size_t kwords = gen_.empty() ? 0 : gen_[0].size();
  std::vector<std::uint64_t> u(kwords, 0);
  for (std::size_t j = 0; j < info.size(); ++j)
    if (info[j] & 1u) u[j / 64] ^= 1ULL << (j % 64);

  std::vector<std::uint8_t> code(n_, 0);
  for (std::size_t j = 0; j < info.size(); ++j) code[info_pos_[j]] = info[j] & 1u;
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t wI = 0; wI < kwords; ++wI) acc ^= gen_[i][wI] & u[wI];
    code[parity_pos_[i]] =
        static_cast<std::uint8_t>(std::popcount(acc) & 1u);
  }
  return code;
}

bool LdpcCode::syndrome_zero(std::span<const std::uint8_t> code_bits) const {
  for (const auto& vars : check_vars_) {
    unsigned s = 0;
    for (std::uint32_t v : vars) s ^= code_bits[v] & 1u;
    if (s) return false;
  }
  return true;
}

DecodeResult LdpcCode::decode(std::span<const double> llrs, int max_iter,
                              bool strict) const {
  if (llrs.size() != n_) throw std::invalid_argument("llr length mismatch");

  std::size_t n_edges = 0;
  for (const auto& vars : check_vars_) n_edges += vars.size();
  std::vector<double> c2v(n_edges, 0.0);
  std::vector<double> totals(llrs.begin(), llrs.end());
  std::vector<std::uint8_t> decision(n_);

  // soft bits u = tanh(-L/2) = E[(-1)^b]; a check's extrinsic is the product
  // of its other edges' soft bits
  constexpr double kTanhGuard = 1.0 - 1e-15;

  DecodeResult result;
  std::vector<double> u, prefix, suffix;
  for (int iter = 1; iter <= max_iter; ++iter) {
    std::size_t e0 = 0;
    for (const auto& vars : check_vars_) {
      const std::size_t d = vars.size();
      u.resize(d);
      prefix.resize(d + 1);
      suffix.resize(d + 1);
      for (std::size_t j = 0; j < d; ++j) {
        const double v2c = std::clamp(totals[vars[j]] - c2v[e0 + j],
                                      -kLlrMax, kLlrMax);
        u[j] = std::tanh(-0.5 * v2c);
      }
      prefix[0] = 1.0;
      for (std::size_t j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * u[j];
      suffix[d] = 1.0;
      for (std::size_t j = d; j > 0; --j) suffix[j - 1] = suffix[j] * u[j - 1];
      for (std::size_t j = 0; j < d; ++j) {
        const double p =
            std::clamp(prefix[j] * suffix[j + 1], -kTanhGuard, kTanhGuard);
        c2v[e0 + j] = std::clamp(-2.0 * std::atanh(p), -kLlrMax, kLlrMax);
      }
      e0 += d;
    }

    std::fill(totals.begin(), totals.end(), 0.0);
    e0 = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t j = 0; j < check_vars_[r].size(); ++j)
        totals[check_vars_[r][j]] += c2v[e0 + j];
      e0 += check_vars_[r].size();
    }
    for (std::size_t v = 0; v < n_; ++v) {
      totals[v] += llrs[v];
      decision[v] = hard_decide(totals[v]);
    }

    result.iterations = iter;
    if (syndrome_zero(decision)) {
      result.converged = true;
      if (!strict) break;
    } else {
      result.converged = false;
    }
  }

  result.code_bits = std::move(decision);
  result.info_bits.resize(k_info());
  for (std::size_t j = 0; j < info_pos_.size(); ++j)
    result.info_bits[j] = result.code_bits[info_pos_[j]];
  return result;
}

}  // namespace cmsim
