#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cmsim/fiber.hpp"
#include "cmsim/rates.hpp"

using namespace cmsim;

namespace {

FiberParams small_params() {
  FiberParams p;
  p.n_symbols = 1024;
  p.oversampling = 4;
  p.n_channels = 1;
  p.span_length = 80.0;
  p.launch_power_dbm = 0.0;
  return p;
}

DualPolSymbols random_qam(const Constellation& c, std::size_t n,
                          std::uint64_t seed) {
  StreamRng rng(seed);
  DualPolSymbols out;
  for (int q = 0; q < 2; ++q) {
    std::vector<std::uint8_t> bits(n * c.m);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    out[q] = map_bits(bits, c);
  }
  return out;
}

double symbol_rms_error(const DualPolSymbols& a, const DualPolSymbols& b) {
  double err = 0.0, ref = 0.0;
  for (int q = 0; q < 2; ++q)
    for (std::size_t l = 0; l < a[q].size(); ++l) {
      err += std::norm(a[q][l] - b[q][l]);
      ref += std::norm(b[q][l]);
    }
  return std::sqrt(err / ref);
}

}  // namespace

TEST_SUITE("fiber") {

TEST_CASE("parameter validation") {
  FiberParams p = small_params();
  p.step_size = 333.0;  // does not divide 80 km
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params();
  p.oversampling = 1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params();
  p.pmd = 0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("beta2 from the dispersion parameter") {
  const FiberParams p;
  // 17 ps/nm/km at 193.4 THz is about -21.7 ps^2/km
  CHECK(p.beta2() * 1e27 == doctest::Approx(-21.68).epsilon(0.01));
}

TEST_CASE("WDM grid occupancy and bandwidth guard") {
  FiberParams p = small_params();
  p.n_channels = 11;
  p.spacing = 50.0;
  CHECK(p.channel_offset_hz(0) == doctest::Approx(-250e9));
  CHECK(p.channel_offset_hz(10) == doctest::Approx(250e9));
  // band edge 250 + 16.16 GHz exceeds the +-64 GHz of 4 samples/symbol
  const Constellation c = build_square_qam(4);
  std::vector<DualPolSymbols> ch(p.n_channels);
  for (auto& s : ch) s = random_qam(c, p.n_symbols, 1);
  CHECK_THROWS_AS(rrc_shape(ch, p), std::invalid_argument);
}

TEST_CASE("matched RRC cascade is ISI free at zero distance") {
  FiberParams p = small_params();
  p.span_length = 0.0;
  const Constellation c = build_square_qam(16);
  const DualPolSymbols tx = random_qam(c, p.n_symbols, 2);
  const Waveform w = rrc_shape({tx}, p);
  const Waveform out = ssfm_propagate(w, p);  // zero-length span: identity
  const DualPolSymbols rx = receiver_dsp(out, p, tx);
  CHECK(symbol_rms_error(rx, tx) < 1e-6);
}

TEST_CASE("per-channel power equals the launch power") {
  FiberParams p = small_params();
  p.launch_power_dbm = 3.0;
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 3)}, p);
  double power = 0.0;
  for (const cplx& v : w.pol[0]) power += std::norm(v);
  for (const cplx& v : w.pol[1]) power += std::norm(v);
  power /= 2.0 * static_cast<double>(w.size());
  const double power_dbm = 10.0 * std::log10(power / 1e-3);
  CHECK(std::abs(power_dbm - 3.0) < 0.01);
}

TEST_CASE("dispersion alone is all-pass") {
  FiberParams p = small_params();
  p.gamma = 0.0;
  p.attenuation = 0.0;
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 4)}, p);
  const Waveform out = ssfm_propagate(w, p);
  CHECK(out.energy() == doctest::Approx(w.energy()).epsilon(1e-12));
}

TEST_CASE("lossless nonlinear propagation conserves energy") {
  FiberParams p = small_params();
  p.attenuation = 0.0;
  p.launch_power_dbm = 6.0;
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 5)}, p);
  const Waveform out = ssfm_propagate(w, p);
  CHECK(std::abs(out.energy() / w.energy() - 1.0) < 1e-6);
}

TEST_CASE("attenuation drops the power by exactly alpha L") {
  FiberParams p = small_params();
  p.gamma = 0.0;
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 6)}, p);
  const Waveform out = ssfm_propagate(w, p);
  const double drop_db = 10.0 * std::log10(w.energy() / out.energy());
  CHECK(drop_db == doctest::Approx(16.0).epsilon(1e-10));
}

TEST_CASE("EDFA gain restores the span loss") {
  FiberParams p = small_params();
  p.gamma = 0.0;
  p.nf_db = -300.0;  // effectively noiseless
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 7)}, p);
  StreamRng rng(1);
  const Waveform out = edfa(ssfm_propagate(w, p), p, rng);
  CHECK(out.energy() == doctest::Approx(w.energy()).epsilon(1e-9));
}

TEST_CASE("ASE variance matches the analytic PSD") {
  FiberParams p = small_params();
  p.n_symbols = 1 << 15;
  Waveform dark;
  dark.sample_rate = p.sample_rate_hz();
  dark.pol[0].assign(p.n_samples(), 0.0);
  dark.pol[1].assign(p.n_samples(), 0.0);
  StreamRng rng(2);
  const Waveform out = edfa(dark, p, rng);
  const double expected = p.ase_psd() * p.sample_rate_hz();
  double var = 0.0;
  for (int q = 0; q < 2; ++q)
    for (const cplx& v : out.pol[q]) var += std::norm(v);
  var /= 2.0 * static_cast<double>(out.size());
  CHECK(std::abs(var / expected - 1.0) < 0.01);
}

TEST_CASE("noise figure and spontaneous emission factor") {
  FiberParams p = small_params();
  p.span_length = 300.0;  // high gain
  // nf_db defaults to 10 log10(2): n_sp within a hair of 1 at high gain
  CHECK(p.nsp() == doctest::Approx(1.0).epsilon(1e-4));
  const double g = p.span_gain_linear();
  const double nf_back = 2.0 * p.nsp() * (g - 1.0) / g;
  CHECK(10.0 * std::log10(nf_back) == doctest::Approx(p.nf_db).epsilon(1e-12));
}

TEST_CASE("the gamma = 0 chain is transparent") {
  FiberParams p = small_params();
  p.gamma = 0.0;
  p.nf_db = -300.0;
  const Constellation c = build_square_qam(16);
  const DualPolSymbols tx = random_qam(c, p.n_symbols, 8);
  StreamRng rng(3);
  const Waveform out = edfa(ssfm_propagate(rrc_shape({tx}, p), p), p, rng);
  const DualPolSymbols rx = receiver_dsp(out, p, tx);
  CHECK(symbol_rms_error(rx, tx) < 1e-4);
}

TEST_CASE("a global phase rotation is compensated exactly") {
  FiberParams p = small_params();
  p.gamma = 0.0;
  const Constellation c = build_square_qam(16);
  const DualPolSymbols tx = random_qam(c, p.n_symbols, 9);
  Waveform w = ssfm_propagate(rrc_shape({tx}, p), p);
  StreamRng rng(4);
  w = edfa(w, p, rng);
  Waveform rotated = w;
  const cplx rot = std::exp(cplx{0.0, 0.8});
  for (int q = 0; q < 2; ++q)
    for (cplx& v : rotated.pol[q]) v *= rot;
  const DualPolSymbols rx_a = receiver_dsp(w, p, tx);
  const DualPolSymbols rx_b = receiver_dsp(rotated, p, tx);
  CHECK(symbol_rms_error(rx_b, rx_a) < 1e-9);
  CHECK(std::abs(effective_snr(rx_b[0], tx[0]) -
                 effective_snr(rx_a[0], tx[0])) <
        1e-6 * effective_snr(rx_a[0], tx[0]));
}

TEST_CASE("residual per-point phase after compensation is negligible") {
  FiberParams p = small_params();
  p.launch_power_dbm = 4.0;
  const Constellation c = build_square_qam(16);
  const DualPolSymbols tx = random_qam(c, p.n_symbols, 10);
  StreamRng rng(5);
  const Waveform out = edfa(ssfm_propagate(rrc_shape({tx}, p), p), p, rng);
  const DualPolSymbols rx = receiver_dsp(out, p, tx);
  for (int i = 0; i < c.size(); ++i) {
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < tx[0].size(); ++l)
      if (std::abs(tx[0][l] - c.points[i]) < 1e-12)
        acc += rx[0][l] * std::conj(tx[0][l]);
    if (std::abs(acc) > 0.0) CHECK(std::abs(std::arg(acc)) < 1e-3);
  }
}

TEST_CASE("effective SNR") {
  const Constellation c = build_square_qam(4);
  StreamRng rng(6);
  std::vector<cplx> tx(100000);
  for (cplx& v : tx)
    v = c.points[rng.uniform_below(4)];
  SUBCASE("identical sequences are degenerate") {
    CHECK_THROWS_AS(effective_snr(tx, tx), std::invalid_argument);
  }
  SUBCASE("known injected noise is recovered") {
    const double var = 0.05;
    std::vector<cplx> rx(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i)
      rx[i] = tx[i] + rng.complex_gaussian(var);
    const double rho = effective_snr(rx, tx);
    CHECK(std::abs(rho - 1.0 / var) < 0.02 / var);
  }
}

TEST_CASE("halving the step changes the output by less than 1e-4") {
  FiberParams p = small_params();
  p.launch_power_dbm = 3.0;
  const Constellation c = build_square_qam(16);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 11)}, p);
  const Waveform coarse = ssfm_propagate(w, p);
  FiberParams fine = p;
  fine.step_size = 50.0;
  const Waveform fine_out = ssfm_propagate(w, fine);
  double err = 0.0, ref = 0.0;
  for (int q = 0; q < 2; ++q)
    for (std::size_t i = 0; i < coarse.pol[q].size(); ++i) {
      err += std::norm(coarse.pol[q][i] - fine_out.pol[q][i]);
      ref += std::norm(fine_out.pol[q][i]);
    }
  CHECK(std::sqrt(err / ref) < 1e-4);
}

TEST_CASE("waveform binary io round trip") {
  FiberParams p = small_params();
  p.n_symbols = 64;
  const Constellation c = build_square_qam(4);
  const Waveform w = rrc_shape({random_qam(c, p.n_symbols, 12)}, p);
  std::ostringstream out(std::ios::binary);
  write_waveform(out, w);
  std::istringstream in(out.str(), std::ios::binary);
  const Waveform back = read_waveform(in);
  CHECK(back.sample_rate == w.sample_rate);
  REQUIRE(back.size() == w.size());
  for (int q = 0; q < 2; ++q)
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(back.pol[q][i] == w.pol[q][i]);
}

TEST_CASE("fiber GMI does not beat AWGN at the same effective SNR") {
  FiberParams p = small_params();
  p.n_symbols = 4096;
  p.launch_power_dbm = 1.0;
  p.span_length = 200.0;
  const Constellation c = build_square_qam(16);
  const DualPolSymbols tx = random_qam(c, p.n_symbols, 13);
  StreamRng rng(7);
  const Waveform out = edfa(ssfm_propagate(rrc_shape({tx}, p), p), p, rng);
  const DualPolSymbols rx = receiver_dsp(out, p, tx);

  std::vector<cplx> rx_all(rx[0]);
  rx_all.insert(rx_all.end(), rx[1].begin(), rx[1].end());
  std::vector<cplx> tx_all(tx[0]);
  tx_all.insert(tx_all.end(), tx[1].begin(), tx[1].end());
  const double rho = effective_snr(rx_all, tx_all);

  LlrFrame fiber_frame;
  fiber_frame.m = c.m;
  fiber_frame.n = rx_all.size();
  fiber_frame.kind = LlrKind::exact;
  fiber_frame.llrs = demap(rx_all, rho, c, LlrKind::exact);
  fiber_frame.bits.resize(rx_all.size() * c.m);
  for (std::size_t l = 0; l < tx_all.size(); ++l) {
    int idx = 0;
    for (int i = 0; i < c.size(); ++i)
      if (std::abs(tx_all[l] - c.points[i]) < 1e-12) idx = i;
    for (int k = 0; k < c.m; ++k)
      fiber_frame.bits[l * c.m + k] =
          static_cast<std::uint8_t>(c.label_bit(idx, k));
  }
  const RateEstimate fiber_gmi = estimate_gmi(fiber_frame);

  StreamRng awgn_rng(8);
  const AwgnFrame ref = simulate_awgn_frame(c, rho, rx_all.size(), awgn_rng,
                                            LlrKind::exact);
  const RateEstimate awgn_gmi = estimate_gmi(ref.frame);
  const double tol = 3.0 * std::sqrt(fiber_gmi.std_err * fiber_gmi.std_err +
                                     awgn_gmi.std_err * awgn_gmi.std_err);
  CHECK(fiber_gmi.value <= awgn_gmi.value + tol);
}

}  // TEST_SUITE
