// Generates the repeat-accumulate LDPC codes shipped under data/codes/.
// H = [A | T]: T is the dual-diagonal accumulator, A places `weight-8` and
// weight-3 information columns at random while avoiding 4-cycles.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmsim/ldpc.hpp"
#include "cmsim/rng.hpp"

namespace {

using cmsim::StreamRng;

struct Spec {
  std::size_t n;
  std::size_t k;
  double frac_w8;  // fraction of info columns with weight 8 (rest weight 3)
  std::uint64_t seed;
};

std::string build_alist(const Spec& spec) {
  const std::size_t p = spec.n - spec.k;
  std::vector<std::vector<std::uint32_t>> cols(spec.n);
  std::set<std::pair<std::uint32_t, std::uint32_t>> row_pairs;

  auto add_pair = [&](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return row_pairs.insert({a, b}).second;
  };

  // accumulator part: column k+j checks rows j and j+1
  for (std::size_t j = 0; j < p; ++j) {
    cols[spec.k + j].push_back(static_cast<std::uint32_t>(j));
    if (j + 1 < p) {
      cols[spec.k + j].push_back(static_cast<std::uint32_t>(j + 1));
      add_pair(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j + 1));
    }
  }

  StreamRng rng(spec.seed);
  const std::size_t n_w8 =
      static_cast<std::size_t>(spec.frac_w8 * static_cast<double>(spec.k));
  for (std::size_t c = 0; c < spec.k; ++c) {
    const int weight = c < n_w8 ? 8 : 3;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) {
        std::cerr << "giving up on column " << c << "\n";
        std::exit(1);
      }
      std::set<std::uint32_t> rows;
      while (static_cast<int>(rows.size()) < weight)
        rows.insert(rng.uniform_below(static_cast<std::uint32_t>(p)));
      // reject any placement that would close a 4-cycle
      bool ok = true;
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      for (auto a = rows.begin(); a != rows.end() && ok; ++a) {
        auto b = a;
        for (++b; b != rows.end() && ok; ++b) {
          if (row_pairs.count({*a, *b}))
            ok = false;
          else
            pairs.push_back({*a, *b});
        }
      }
      if (!ok) continue;
      for (auto& pr : pairs) row_pairs.insert(pr);
      cols[c].assign(rows.begin(), rows.end());
      break;
    }
  }

  // serialize through the library writer so files are in canonical form
  std::ostringstream alist;
  {
    std::vector<std::vector<std::uint32_t>> rows_adj(p);
    for (std::size_t c = 0; c < spec.n; ++c)
      for (std::uint32_t r : cols[c]) rows_adj[r].push_back(c);
    std::size_t max_col = 0, max_row = 0;
    for (const auto& v : cols) max_col = std::max(max_col, v.size());
    for (const auto& v : rows_adj) max_row = std::max(max_row, v.size());
    auto line = [&alist](const std::vector<long long>& vals) {
      for (std::size_t i = 0; i < vals.size(); ++i)
        alist << (i ? " " : "") << vals[i];
      alist << '\n';
    };
    line({static_cast<long long>(spec.n), static_cast<long long>(p)});
    line({static_cast<long long>(max_col), static_cast<long long>(max_row)});
    std::vector<long long> w;
    for (const auto& v : cols) w.push_back(static_cast<long long>(v.size()));
    line(w);
    w.clear();
    for (const auto& v : rows_adj)
      w.push_back(static_cast<long long>(v.size()));
    line(w);
    for (const auto& v : cols) {
      w.clear();
      for (std::uint32_t r : v) w.push_back(r + 1);
      w.resize(max_col, 0);
      line(w);
    }
    for (const auto& v : rows_adj) {
      w.clear();
      for (std::uint32_t c : v) w.push_back(c + 1);
      w.resize(max_row, 0);
      line(w);
    }
  }
  return alist.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: " << argv[0] << " <n> <k> <frac_w8> <seed> <out>\n";
    return 2;
  }
  Spec spec;
  spec.n = std::strtoull(argv[1], nullptr, 10);
  spec.k = std::strtoull(argv[2], nullptr, 10);
  spec.frac_w8 = std::strtod(argv[3], nullptr);
  spec.seed = std::strtoull(argv[4], nullptr, 10);

  const std::string text = build_alist(spec);
  {
    // validate: must load cleanly and keep full rank
    std::istringstream in(text);
    const cmsim::LdpcCode code = cmsim::LdpcCode::load_alist(in);
    std::ostringstream round;
    code.write_alist(round);
    if (round.str() != text) {
      std::cerr << "writer round-trip mismatch\n";
      return 1;
    }
    std::cerr << "n=" << code.n_code() << " k=" << code.k_info()
              << " rate=" << code.rate() << "\n";
  }
  std::ofstream out(argv[5], std::ios::binary);
  out << text;
  return out ? 0 : 1;
}
