#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cmsim {

// splitmix64 finalizer; used to derive independent stream seeds from a
// master seed plus up to three stream coordinates (point, frame, role).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(a ^ 0x517cc1b727220a95ULL));
  h = splitmix64(h ^ splitmix64(b ^ 0x6c62272e07bb0142ULL));
  h = splitmix64(h ^ splitmix64(c ^ 0x2f653b1b87a8c1a3ULL));
  return h;
}

// Stream identities used by the sweep harness. A (master, point, frame, role)
// tuple names one RNG stream, so results do not depend on scheduling order.
enum class StreamRole : std::uint64_t {
  info_bits = 1,
  channel_noise = 2,
  interleaver = 3,
  neighbor_data = 4,
  filler_bits = 5,
  ase_noise = 6,
};

// Deterministic random stream. Gaussians come from an explicit Box-Muller
// transform so the byte sequence depends only on the engine, not on the
// standard library's normal_distribution implementation.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : engine_(seed) {}
  StreamRng(std::uint64_t master, std::uint64_t point, std::uint64_t frame,
            StreamRole role)
      : engine_(derive_seed(master, point, frame,
                            static_cast<std::uint64_t>(role))) {}

  // uniform in [0, 1)
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t bits64() { return engine_(); }

  int bit() { return static_cast<int>(engine_() >> 63); }

  std::uint32_t uniform_below(std::uint32_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::uint32_t>(v % n);
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // circularly symmetric complex Gaussian with E[|z|^2] = variance
  std::complex<double> complex_gaussian(double variance) {
    const double s = std::sqrt(variance / 2.0);
    return {s * gaussian(), s * gaussian()};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cmsim
