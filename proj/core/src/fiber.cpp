#include "cmsim/fiber.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace cmsim {

namespace {

constexpr double kPlanck = 6.62607015e-34;  // J s
constexpr double kLightSpeed = 2.99792458e8;  // m/s

std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}

// In-place complex FFT working on an FFTW-owned buffer; callers copy data in
// and out. Plan creation is serialized (FFTW requirement).
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  std::size_t size() const { return n_; }

  // std::complex<double> is layout-compatible with fftw_complex
  void load(std::span<const cplx> in) {
    std::memcpy(static_cast<void*>(buf_),
                static_cast<const void*>(in.data()), sizeof(cplx) * n_);
  }
  void store(std::span<cplx> out) const {
    std::memcpy(static_cast<void*>(out.data()),
                static_cast<const void*>(buf_), sizeof(cplx) * n_);
  }
  void forward() { fftw_execute(fwd_); }
  void inverse() {
    fftw_execute(inv_);
    const double s = 1.0 / static_cast<double>(n_);
    cplx* d = data();
    for (std::size_t i = 0; i < n_; ++i) d[i] *= s;
  }

 private:
  std::size_t n_;
  fftw_complex* buf_;
  fftw_plan fwd_, inv_;
};

// angular frequency of FFT bin k
double bin_omega(std::size_t k, std::size_t n, double fs) {
  const double kk = k <= n / 2 ? static_cast<double>(k)
                               : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * M_PI * kk * fs / static_cast<double>(n);
}

// sqrt raised-cosine magnitude at frequency f for symbol rate rs
double rrc_response(double f, double rs, double beta) {
  const double af = std::abs(f);
  const double f1 = 0.5 * rs * (1.0 - beta);
  const double f2 = 0.5 * rs * (1.0 + beta);
  if (af <= f1) return 1.0;
  if (af >= f2) return 0.0;
  const double arg = M_PI * (af - f1) / (rs * beta);
  return std::sqrt(0.5 * (1.0 + std::cos(arg)));
}

void apply_rrc(Fft& fft, double fs, double rs, double beta) {
  fft.forward();
  cplx* d = fft.data();
  const std::size_t n = fft.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_omega(k, n, fs) / (2.0 * M_PI);
    d[k] *= rrc_response(f, rs, beta);
  }
  fft.inverse();
}

}  // namespace

double FiberParams::beta2() const {
  const double lambda = kLightSpeed / carrier_frequency;
  const double d_si = dispersion * 1e-6;  // ps/nm/km -> s/m^2
  return -d_si * lambda * lambda / (2.0 * M_PI * kLightSpeed);
}

double FiberParams::span_gain_linear() const {
  return std::pow(10.0, attenuation * span_length / 10.0);
}

double FiberParams::nsp() const {
  const double g = span_gain_linear();
  if (g <= 1.0) return 0.0;
  return std::pow(10.0, nf_db / 10.0) / 2.0 * g / (g - 1.0);
}

double FiberParams::ase_psd() const {
  const double g = span_gain_linear();
  if (g <= 1.0) return 0.0;
  return nsp() * (g - 1.0) * kPlanck * carrier_frequency;
}

void FiberParams::validate() const {
  if (attenuation < 0 || dispersion == 0 || gamma < 0 || span_length < 0 ||
      symbol_rate <= 0 || spacing <= 0 || n_channels < 1 || step_size <= 0 ||
      rolloff <= 0 || rolloff > 1 || n_symbols < 2)
    throw std::invalid_argument("fiber parameter out of range");
  if (pmd != 0.0) throw std::invalid_argument("nonzero PMD is not modeled");
  if (oversampling < 2)
    throw std::invalid_argument("oversampling must be at least 2");
  const double steps = span_m() / step_size;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(steps, 1.0))
    throw std::invalid_argument("step size must divide the span length");
}

double Waveform::energy() const {
  double e = 0.0;
  for (const auto& u : pol)
    for (const cplx& v : u) e += std::norm(v);
  return e;
}

Waveform rrc_shape(const std::vector<DualPolSymbols>& channel_symbols,
                   const FiberParams& p) {
  p.validate();
  if (channel_symbols.size() != static_cast<std::size_t>(p.n_channels))
    throw std::invalid_argument("need one symbol stream per channel");
  const std::size_t n = p.n_samples();
  const double fs = p.sample_rate_hz();
  const double rs = p.symbol_rate_hz();
  const double edge = std::abs(p.channel_offset_hz(p.n_channels - 1)) +
                      0.5 * rs * (1.0 + p.rolloff);
  if (edge > 0.5 * fs)
    throw std::invalid_argument(
        "WDM grid exceeds the sampling bandwidth; raise oversampling");

  const double p_target = 1e-3 * std::pow(10.0, p.launch_power_dbm / 10.0);

  Waveform w;
  w.sample_rate = fs;
  w.pol[0].assign(n, 0.0);
  w.pol[1].assign(n, 0.0);

  Fft fft(n);
  std::vector<cplx> shaped(n);
  for (int ch = 0; ch < p.n_channels; ++ch) {
    // snap the channel offset to the cyclic frequency grid
    const double bins = p.channel_offset_hz(ch) * n / fs;
    const double f_ch = std::round(bins) * fs / static_cast<double>(n);
    for (int q = 0; q < 2; ++q) {
      const std::vector<cplx>& sym = channel_symbols[ch][q];
      if (sym.size() != p.n_symbols)
        throw std::invalid_argument("symbol stream length mismatch");
      std::fill(shaped.begin(), shaped.end(), cplx{0.0, 0.0});
      for (std::size_t l = 0; l < sym.size(); ++l)
        shaped[l * p.oversampling] = sym[l];
      fft.load(shaped);
      apply_rrc(fft, fs, rs, p.rolloff);
      fft.store(shaped);

      double e = 0.0;
      for (const cplx& v : shaped) e += std::norm(v);
      const double scale = std::sqrt(p_target * n / e);
      const double dphi = 2.0 * M_PI * f_ch / fs;
      for (std::size_t i = 0; i < n; ++i)
        w.pol[q][i] += shaped[i] * scale *
                       cplx{std::cos(dphi * i), std::sin(dphi * i)};
    }
  }
  return w;
}

Waveform ssfm_propagate(const Waveform& w, const FiberParams& p) {
  p.validate();
  const std::size_t n = w.size();
  if (n == 0 || w.pol[1].size() != n)
    throw std::invalid_argument("empty or ragged waveform");
  const double fs = w.sample_rate;
  const std::size_t steps =
      static_cast<std::size_t>(std::round(p.span_m() / p.step_size));
  if (steps == 0) return w;  // zero-length span
  const double h = p.span_m() / static_cast<double>(steps);

  const double alpha_np_m = p.attenuation * std::log(10.0) / 10.0 / 1e3;
  const double b2 = p.beta2();
  const double gamma_m = p.gamma / 1e3 * (p.manakov ? 8.0 / 9.0 : 1.0);

  // frequency-domain factor for a linear step of length dz
  std::vector<cplx> lin_full(n), lin_half(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double om = bin_omega(k, n, fs);
    const double phase = 0.5 * b2 * om * om;
    const double loss = -0.5 * alpha_np_m;
    lin_full[k] = std::exp(cplx{loss * h, phase * h});
    lin_half[k] = std::exp(cplx{loss * h * 0.5, phase * h * 0.5});
  }

  Fft fx(n), fy(n);
  fx.load(w.pol[0]);
  fy.load(w.pol[1]);
  cplx* ux = fx.data();
  cplx* uy = fy.data();

  auto linear = [&](const std::vector<cplx>& op) {
    fx.forward();
    fy.forward();
    for (std::size_t k = 0; k < n; ++k) {
      ux[k] *= op[k];
      uy[k] *= op[k];
    }
    fx.inverse();
    fy.inverse();
  };
  auto nonlinear = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = gamma_m * h * (std::norm(ux[i]) + std::norm(uy[i]));
      const cplx rot{std::cos(phi), std::sin(phi)};
      ux[i] *= rot;
      uy[i] *= rot;
    }
  };

  linear(lin_half);
  for (std::size_t s = 0; s + 1 < steps; ++s) {
    nonlinear();
    linear(lin_full);
  }
  nonlinear();
  linear(lin_half);

  Waveform out;
  out.sample_rate = fs;
  out.pol[0].resize(n);
  out.pol[1].resize(n);
  fx.store(out.pol[0]);
  fy.store(out.pol[1]);
  for (int q = 0; q < 2; ++q)
    for (const cplx& v : out.pol[q])
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("split-step integration became unstable");
  return out;
}

Waveform edfa(const Waveform& w, const FiberParams& p, StreamRng& rng) {
  const double gain_field = std::sqrt(p.span_gain_linear());
  const double noise_var = p.ase_psd() * w.sample_rate;
  Waveform out;
  out.sample_rate = w.sample_rate;
  for (int q = 0; q < 2; ++q) {
    out.pol[q].resize(w.pol[q].size());
    for (std::size_t i = 0; i < w.pol[q].size(); ++i)
      out.pol[q][i] = w.pol[q][i] * gain_field + rng.complex_gaussian(noise_var);
  }
  return out;
}

DualPolSymbols receiver_dsp(const Waveform& w, const FiberParams& p,
                            const DualPolSymbols& tx_center_symbols) {
  const std::size_t n = w.size();
  const double fs = w.sample_rate;
  const double rs = p.symbol_rate_hz();
  if (tx_center_symbols[0].size() != p.n_symbols ||
      tx_center_symbols[1].size() != p.n_symbols ||
      n != p.n_samples())
    throw std::invalid_argument("tx symbol / waveform length mismatch");

  const int central = (p.n_channels - 1) / 2;
  const double bins = p.channel_offset_hz(central) * n / fs;
  const double f_ch = std::round(bins) * fs / static_cast<double>(n);
  const double b2 = p.beta2();
  const double edc_len = p.span_m();

  DualPolSymbols rx;
  Fft fft(n);
  std::vector<cplx> work(n);
  for (int q = 0; q < 2; ++q) {
    // shift the central channel to baseband
    const double dphi = -2.0 * M_PI * f_ch / fs;
    for (std::size_t i = 0; i < n; ++i)
      work[i] = w.pol[q][i] * cplx{std::cos(dphi * i), std::sin(dphi * i)};
    fft.load(work);
    fft.forward();
    cplx* d = fft.data();
    for (std::size_t k = 0; k < n; ++k) {
      const double om = bin_omega(k, n, fs);
      d[k] *= std::exp(cplx{0.0, -0.5 * b2 * om * om * edc_len});
      d[k] *= rrc_response(om / (2.0 * M_PI), rs, p.rolloff);
    }
    fft.inverse();
    fft.store(work);

    rx[q].resize(p.n_symbols);
    for (std::size_t l = 0; l < p.n_symbols; ++l)
      rx[q][l] = work[l * p.oversampling];

    // data-aided complex gain (amplitude and common phase)
    const std::vector<cplx>& tx = tx_center_symbols[q];
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t l = 0; l < p.n_symbols; ++l) {
      num += rx[q][l] * std::conj(tx[l]);
      den += std::norm(tx[l]);
    }
    if (std::abs(num) == 0.0)
      throw std::invalid_argument("received signal is orthogonal to data");
    const cplx g = num / den;
    for (cplx& v : rx[q]) v /= g;

    // per-constellation-point mean phase removal
    std::map<std::pair<double, double>, cplx> rot;
    for (std::size_t l = 0; l < p.n_symbols; ++l)
      rot[{tx[l].real(), tx[l].imag()}] += rx[q][l] * std::conj(tx[l]);
    for (auto& [pt, acc] : rot) {
      const double mag = std::abs(acc);
      acc = mag > 0.0 ? acc / mag : cplx{1.0, 0.0};
    }
    for (std::size_t l = 0; l < p.n_symbols; ++l)
      rx[q][l] *= std::conj(rot[{tx[l].real(), tx[l].imag()}]);
  }
  return rx;
}

double effective_snr(std::span<const cplx> rx, std::span<const cplx> tx) {
  if (rx.size() != tx.size() || rx.empty())
    throw std::invalid_argument("rx/tx length mismatch");
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sig += std::norm(tx[i]);
    err += std::norm(rx[i] - tx[i]);
  }
  if (err <= 0.0)
    throw std::invalid_argument("zero error power; SNR is unbounded");
  return sig / err;
}

void write_waveform(std::ostream& out, const Waveform& w) {
  const char magic[4] = {'C', 'M', 'W', 'F'};
  const std::uint32_t version = 1;
  const std::uint32_t n_pol = 2;
  const std::uint64_t n = w.size();
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&n_pol), sizeof(n_pol));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&w.sample_rate),
            sizeof(w.sample_rate));
  for (const auto& u : w.pol)
    out.write(reinterpret_cast<const char*>(u.data()),
              static_cast<std::streamsize>(sizeof(cplx) * u.size()));
}

Waveform read_waveform(std::istream& in) {
  char magic[4];
  std::uint32_t version = 0, n_pol = 0;
  std::uint64_t n = 0;
  Waveform w;
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CMWF", 4) != 0)
    throw std::runtime_error("not a waveform file");
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&n_pol), sizeof(n_pol));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&w.sample_rate), sizeof(w.sample_rate));
  if (version != 1 || n_pol != 2)
    throw std::runtime_error("unsupported waveform format");
  for (auto& u : w.pol) {
    u.resize(n);
    in.read(reinterpret_cast<char*>(u.data()),
            static_cast<std::streamsize>(sizeof(cplx) * n));
  }
  if (!in) throw std::runtime_error("truncated waveform file");
  return w;
}

}  // namespace cmsim
