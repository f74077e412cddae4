#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmsim/constellation.hpp"
#include "cmsim/rng.hpp"

namespace cmsim {

// Physical and numerical parameters of the WDM link. Angle brackets give the
// unit each field is stored in; conversions happen in the accessors.
struct FiberParams {
  double attenuation = 0.2;     // <dB/km>
  double dispersion = 17.0;     // <ps/nm/km>
  double gamma = 1.2;           // <1/(W km)>
  double span_length = 80.0;    // <km>; a single span with one EDFA
  double pmd = 0.0;             // <ps/sqrt(km)>; must stay 0
  double symbol_rate = 32.0;    // <Gbaud>
  double nf_db = 3.0102999566398116;  // EDFA noise figure <dB>; ~n_sp = 1
  int n_channels = 3;
  double spacing = 50.0;        // <GHz>
  double rolloff = 0.01;
  double step_size = 100.0;     // <m>; must divide the span
  int oversampling = 4;         // samples per symbol
  double launch_power_dbm = 0.0;  // per channel
  std::size_t n_symbols = 1 << 14;  // per polarization and channel
  bool manakov = false;  // scale the nonlinear coefficient by 8/9
  double carrier_frequency = 193.4e12;  // <Hz>, for the ASE PSD

  double symbol_rate_hz() const { return symbol_rate * 1e9; }
  double spacing_hz() const { return spacing * 1e9; }
  double sample_rate_hz() const { return symbol_rate_hz() * oversampling; }
  std::size_t n_samples() const { return n_symbols * oversampling; }
  double span_m() const { return span_length * 1e3; }
  // beta2 <s^2/m> from the dispersion parameter D: beta2 = -D lambda^2/(2 pi c)
  double beta2() const;
  double channel_offset_hz(int channel) const {
    return (channel - 0.5 * (n_channels - 1)) * spacing_hz();
  }
  double span_gain_linear() const;  // power gain restoring the span loss
  double ase_psd() const;  // W/Hz per polarization at the EDFA output
  double nsp() const;      // spontaneous emission factor implied by nf_db

  void validate() const;
};

struct Waveform {
  std::array<std::vector<cplx>, 2> pol;  // x and y field samples <sqrt(W)>
  double sample_rate = 0.0;              // <Hz>

  std::size_t size() const { return pol[0].size(); }
  double energy() const;  // sum |u|^2 over both polarizations
};

using DualPolSymbols = std::array<std::vector<cplx>, 2>;

// RRC-shapes one symbol stream per channel and polarization, sets each
// channel's average power to launch_power_dbm, shifts to the WDM grid and
// sums. Blocks are treated as cyclic throughout.
Waveform rrc_shape(const std::vector<DualPolSymbols>& channel_symbols,
                   const FiberParams& p);

// Symmetrized split-step integration of the coupled-polarization NLSE over
// one span: frequency-domain dispersion/loss steps around time-domain phase
// rotations by gamma*(|ux|^2+|uy|^2)*dz (8/9 of that with manakov set).
Waveform ssfm_propagate(const Waveform& w, const FiberParams& p);

// Flat gain restoring the span loss plus circular complex white Gaussian
// noise of PSD nsp*(G-1)*h*nu per polarization.
Waveform edfa(const Waveform& w, const FiberParams& p, StreamRng& rng);

// EDC (exact inverse of the span's accumulated dispersion), selection of the
// central channel, matched RRC filtering, downsampling to one sample per
// symbol, least-squares gain normalization against the known transmitted
// symbols and per-constellation-point mean phase removal.
DualPolSymbols receiver_dsp(const Waveform& w, const FiberParams& p,
                            const DualPolSymbols& tx_center_symbols);

// rho = E|X|^2 / E|Y-X|^2 over aligned sequences; throws on zero error power.
double effective_snr(std::span<const cplx> rx, std::span<const cplx> tx);

// Interleaved complex binary dump with a small self-describing header.
void write_waveform(std::ostream& out, const Waveform& w);
Waveform read_waveform(std::istream& in);

}  // namespace cmsim
