#include "cmsim/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmsim {

namespace {

constexpr double kEnergyTol = 1e-12;

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

void finalize(Constellation& c) {
  const int M = c.size();
  if (M < 2 || (M & (M - 1)) != 0)
    throw std::invalid_argument("constellation size must be a power of two");
  c.m = 0;
  while ((1 << c.m) < M) ++c.m;

  c.label_to_index.assign(M, -1);
  for (int i = 0; i < M; ++i) {
    const std::uint32_t lab = c.labels[i];
    if (lab >= static_cast<std::uint32_t>(M))
      throw std::invalid_argument("label out of range for constellation size");
    if (c.label_to_index[lab] != -1)
      throw std::invalid_argument("duplicate label in constellation");
    c.label_to_index[lab] = i;
  }

  // normalize to unit average energy
  double e = 0.0;
  for (const cplx& p : c.points) e += std::norm(p);
  e /= M;
  if (e <= 0.0) throw std::invalid_argument("constellation has zero energy");
  const double scale = 1.0 / std::sqrt(e);
  if (std::abs(e - 1.0) > kEnergyTol) {
    for (cplx& p : c.points) p *= scale;
    for (double& lv : c.pam_levels) lv *= scale;
  }

  c.subsets.assign(c.m, {});
  for (int k = 0; k < c.m; ++k) {
    for (int i = 0; i < M; ++i) c.subsets[k][c.label_bit(i, k)].push_back(i);
    if (static_cast<int>(c.subsets[k][0].size()) != M / 2)
      throw std::invalid_argument("labeling does not split evenly per bit");
  }
}

}  // namespace

double Constellation::average_energy() const {
  double e = 0.0;
  for (const cplx& p : points) e += std::norm(p);
  return e / static_cast<double>(points.size());
}

Constellation build_square_qam(int M) {
  if (M != 4 && M != 16 && M != 64 && M != 256)
    throw std::invalid_argument("square QAM supports M in {4,16,64,256}");
  Constellation c;
  c.name = "qam" + std::to_string(M);
  int side = 1;
  while (side * side < M) ++side;
  const int bits_per_dim = [&] {
    int b = 0;
    while ((1 << b) < side) ++b;
    return b;
  }();

  c.points.reserve(M);
  c.labels.reserve(M);
  for (int qi = 0; qi < side; ++qi) {
    for (int ii = 0; ii < side; ++ii) {
      const double re = 2.0 * ii - (side - 1);
      const double im = 2.0 * qi - (side - 1);
      c.points.emplace_back(re, im);
      const std::uint32_t gi = gray_encode(static_cast<std::uint32_t>(ii));
      const std::uint32_t gq = gray_encode(static_cast<std::uint32_t>(qi));
      c.labels.push_back((gi << bits_per_dim) | gq);
    }
  }
  c.square_grid = true;
  c.pam_levels.resize(side);
  for (int i = 0; i < side; ++i) c.pam_levels[i] = 2.0 * i - (side - 1);
  finalize(c);
  return c;
}

namespace {

// Built-in 8QAM definition in the constellation text format: a 4x2 grid with
// natural binary column labels (columns 01 and 10 are geometric neighbors),
// so the labeling is non-Gray on purpose.
constexpr const char* k8QamDefinition = R"(# rectangular 8QAM, label = [col_b1 col_b0 row]
000 -3 -1
010 -1 -1
100  1 -1
110  3 -1
001 -3  1
011 -1  1
101  1  1
111  3  1
)";

}  // namespace

Constellation build_8qam() {
  std::istringstream in(k8QamDefinition);
  Constellation c = load_constellation(in, "qam8");
  return c;
}

Constellation load_constellation(std::istream& in, const std::string& name,
                                 bool* renormalized) {
  Constellation c;
  c.name = name;
  std::string line;
  int m = -1;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string label_str;
    double re, im;
    if (!(row >> label_str)) continue;  // blank line
    if (!(row >> re >> im))
      throw std::invalid_argument("malformed constellation row: " + line);
    std::string trailing;
    if (row >> trailing)
      throw std::invalid_argument("trailing tokens in row: " + line);
    if (m == -1)
      m = static_cast<int>(label_str.size());
    else if (static_cast<int>(label_str.size()) != m)
      throw std::invalid_argument("inconsistent label length: " + line);
    std::uint32_t lab = 0;
    for (char ch : label_str) {
      if (ch != '0' && ch != '1')
        throw std::invalid_argument("label must be a 0/1 string: " + line);
      lab = (lab << 1) | static_cast<std::uint32_t>(ch - '0');
    }
    c.labels.push_back(lab);
    c.points.emplace_back(re, im);
  }
  if (c.points.empty()) throw std::invalid_argument("empty constellation file");
  if (static_cast<int>(c.points.size()) != (1 << m))
    throw std::invalid_argument("constellation size is not 2^label_length");

  double e = c.average_energy();
  if (renormalized) *renormalized = std::abs(e - 1.0) > 1e-6;
  finalize(c);
  return c;
}

Constellation load_constellation_file(const std::string& path,
                                      bool* renormalized) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constellation file: " + path);
  return load_constellation(in, path, renormalized);
}

void write_constellation(std::ostream& out, const Constellation& c) {
  out << "# " << c.name << "\n";
  for (int i = 0; i < c.size(); ++i) {
    for (int k = 0; k < c.m; ++k) out << c.label_bit(i, k);
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", c.points[i].real(),
                  c.points[i].imag());
    out << buf;
  }
}

Constellation make_constellation(const std::string& id) {
  if (id == "qam4") return build_square_qam(4);
  if (id == "qam16") return build_square_qam(16);
  if (id == "qam64") return build_square_qam(64);
  if (id == "qam256") return build_square_qam(256);
  if (id == "qam8") return build_8qam();
  return load_constellation_file(id);
}

std::vector<int> map_bits_to_indices(std::span<const std::uint8_t> bits,
                                     const Constellation& c) {
  if (bits.size() % c.m != 0)
    throw std::invalid_argument("bit count not divisible by bits per symbol");
  const std::size_t n = bits.size() / c.m;
  std::vector<int> idx(n);
  for (std::size_t l = 0; l < n; ++l) {
    std::uint32_t lab = 0;
    for (int k = 0; k < c.m; ++k)
      lab = (lab << 1) | static_cast<std::uint32_t>(bits[l * c.m + k] & 1u);
    idx[l] = c.label_to_index[lab];
  }
  return idx;
}

std::vector<cplx> map_bits(std::span<const std::uint8_t> bits,
                           const Constellation& c) {
  const std::vector<int> idx = map_bits_to_indices(bits, c);
  std::vector<cplx> symbols(idx.size());
  for (std::size_t l = 0; l < idx.size(); ++l) symbols[l] = c.points[idx[l]];
  return symbols;
}

}  // namespace cmsim
