#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "cmsim/constellation.hpp"

using namespace cmsim;

namespace {

// grid-adjacent point pairs (minimum-distance neighbors on a square grid)
std::vector<std::pair<int, int>> nearest_neighbor_pairs(
    const Constellation& c) {
  double dmin = 1e300;
  for (int i = 0; i < c.size(); ++i)
    for (int j = i + 1; j < c.size(); ++j)
      dmin = std::min(dmin, std::abs(c.points[i] - c.points[j]));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < c.size(); ++i)
    for (int j = i + 1; j < c.size(); ++j)
      if (std::abs(c.points[i] - c.points[j]) < dmin * 1.001)
        pairs.push_back({i, j});
  return pairs;
}

int hamming(std::uint32_t a, std::uint32_t b) {
  return __builtin_popcount(a ^ b);
}

}  // namespace

TEST_SUITE("constellation") {

TEST_CASE("4QAM points and energy") {
  const Constellation c = build_square_qam(4);
  REQUIRE(c.size() == 4);
  CHECK(c.m == 2);
  CHECK(std::abs(c.average_energy() - 1.0) < 1e-12);
  const double a = 1.0 / std::sqrt(2.0);
  std::set<std::pair<double, double>> expect = {
      {-a, -a}, {-a, a}, {a, -a}, {a, a}};
  for (const cplx& p : c.points) {
    bool found = false;
    for (const auto& e : expect)
      if (std::abs(p.real() - e.first) < 1e-12 &&
          std::abs(p.imag() - e.second) < 1e-12)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("square QAM is Gray labeled") {
  for (int M : {4, 16, 64, 256}) {
    const Constellation c = build_square_qam(M);
    const auto pairs = nearest_neighbor_pairs(c);
    if (M == 16) CHECK(pairs.size() == 24);
    for (const auto& [i, j] : pairs)
      CHECK(hamming(c.labels[i], c.labels[j]) == 1);
  }
}

TEST_CASE("16QAM normalization scale is 1/sqrt(10)") {
  const Constellation c = build_square_qam(16);
  // unnormalized {+-1,+-3}^2 grid has mean energy 10
  double e = 0.0;
  for (double a : {-3.0, -1.0, 1.0, 3.0})
    for (double b : {-3.0, -1.0, 1.0, 3.0}) e += a * a + b * b;
  CHECK(e / 16.0 == doctest::Approx(10.0));
  double max_coord = 0.0;
  for (const cplx& p : c.points)
    max_coord = std::max(max_coord, std::abs(p.real()));
  CHECK(max_coord == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("unsupported sizes are rejected") {
  CHECK_THROWS_AS(build_square_qam(8), std::invalid_argument);
  CHECK_THROWS_AS(build_square_qam(32), std::invalid_argument);
  CHECK_THROWS_AS(build_square_qam(1024), std::invalid_argument);
}

TEST_CASE("8QAM shape") {
  const Constellation c = build_8qam();
  REQUIRE(c.size() == 8);
  CHECK(c.m == 3);
  CHECK(std::abs(c.average_energy() - 1.0) < 1e-12);
  for (int k = 0; k < 3; ++k) {
    CHECK(c.subsets[k][0].size() == 4);
    CHECK(c.subsets[k][1].size() == 4);
  }
  // non-Gray: some nearest-neighbor pair differs in at least two bits
  int worst = 0;
  for (const auto& [i, j] : nearest_neighbor_pairs(c))
    worst = std::max(worst, hamming(c.labels[i], c.labels[j]));
  CHECK(worst >= 2);
}

TEST_CASE("partition invariants hold for all builders") {
  for (const char* id : {"qam4", "qam8", "qam16", "qam64", "qam256"}) {
    const Constellation c = make_constellation(id);
    const int M = c.size();
    std::set<std::uint32_t> labels(c.labels.begin(), c.labels.end());
    CHECK(static_cast<int>(labels.size()) == M);
    for (int k = 0; k < c.m; ++k) {
      std::set<int> all;
      for (int b = 0; b < 2; ++b) {
        CHECK(static_cast<int>(c.subsets[k][b].size()) == M / 2);
        all.insert(c.subsets[k][b].begin(), c.subsets[k][b].end());
      }
      CHECK(static_cast<int>(all.size()) == M);
    }
  }
}

TEST_CASE("text format round trip") {
  const Constellation ref = build_square_qam(4);
  std::ostringstream text;
  write_constellation(text, ref);
  std::istringstream in(text.str());
  const Constellation back = load_constellation(in, "qam4");
  REQUIRE(back.size() == ref.size());
  for (int i = 0; i < 4; ++i) {
    CHECK(back.labels[i] == ref.labels[i]);
    CHECK(std::abs(back.points[i] - ref.points[i]) < 1e-12);
  }
}

TEST_CASE("loader rejects bad files") {
  std::istringstream dup("0 1 0\n0 -1 0\n");
  CHECK_THROWS_AS(load_constellation(dup, "dup"), std::invalid_argument);
  std::istringstream bad_size("00 1 0\n01 -1 0\n10 0 1\n");
  CHECK_THROWS_AS(load_constellation(bad_size, "three"),
                  std::invalid_argument);
  std::istringstream malformed("00 1\n01 -1 0\n10 0 1\n11 0 -1\n");
  CHECK_THROWS_AS(load_constellation(malformed, "mal"),
                  std::invalid_argument);
}

TEST_CASE("loader renormalizes off-energy input") {
  // points of average energy 2 come back scaled by 1/sqrt(2)
  std::istringstream in("0 1.4142135623730951 0\n1 -1.4142135623730951 0\n");
  bool renorm = false;
  const Constellation c = load_constellation(in, "bpsk2", &renorm);
  CHECK(renorm);
  CHECK(std::abs(c.average_energy() - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(c.points[0].real()) - 1.0) < 1e-12);
}

TEST_CASE("map_bits") {
  const Constellation c = build_square_qam(4);
  SUBCASE("single label maps to its point") {
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t bits[2] = {
          static_cast<std::uint8_t>(c.label_bit(i, 0)),
          static_cast<std::uint8_t>(c.label_bit(i, 1))};
      const auto sym = map_bits(bits, c);
      REQUIRE(sym.size() == 1);
      CHECK(std::abs(sym[0] - c.points[i]) == 0.0);
    }
  }
  SUBCASE("empty input gives empty output") {
    CHECK(map_bits(std::span<const std::uint8_t>{}, c).empty());
  }
  SUBCASE("length must divide") {
    const std::uint8_t bits[3] = {0, 1, 0};
    CHECK_THROWS_AS(map_bits(bits, c), std::invalid_argument);
  }
}

TEST_CASE("shipped 8QAM file matches the builtin") {
  const Constellation file =
      load_constellation_file(std::string(CMSIM_DATA_DIR) +
                              "/constellations/qam8.txt");
  const Constellation builtin = build_8qam();
  REQUIRE(file.size() == builtin.size());
  for (int i = 0; i < 8; ++i) {
    CHECK(file.labels[i] == builtin.labels[i]);
    CHECK(std::abs(file.points[i] - builtin.points[i]) < 1e-12);
  }
}

}  // TEST_SUITE
