#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmsim/rng.hpp"

namespace cmsim {

// Seeded Fisher-Yates permutation. interleave moves element i to position
// perm[i]; deinterleave inverts it.
struct Permutation {
  std::vector<std::uint32_t> forward;

  std::size_t size() const { return forward.size(); }

  template <typename T>
  std::vector<T> interleave(std::span<const T> in) const {
    if (in.size() != forward.size())
      throw std::invalid_argument("permutation size mismatch");
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[forward[i]] = in[i];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    if (in.size() != forward.size())
      throw std::invalid_argument("permutation size mismatch");
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[forward[i]];
    return out;
  }
};

inline Permutation make_permutation(std::size_t n, std::uint64_t seed) {
  Permutation p;
  p.forward.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    p.forward[i] = static_cast<std::uint32_t>(i);
  StreamRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint32_t j = rng.uniform_below(static_cast<std::uint32_t>(i));
    std::swap(p.forward[i - 1], p.forward[j]);
  }
  return p;
}

inline std::vector<std::uint8_t> interleave_bits(
    std::span<const std::uint8_t> bits, std::uint64_t seed) {
  return make_permutation(bits.size(), seed).interleave(bits);
}

inline std::vector<std::uint8_t> deinterleave_bits(
    std::span<const std::uint8_t> bits, std::uint64_t seed) {
  return make_permutation(bits.size(), seed).deinterleave(bits);
}

}  // namespace cmsim
