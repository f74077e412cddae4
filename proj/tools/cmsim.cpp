// Command-line front end: rate estimation, BER sweeps, fiber simulation,
// threshold extraction and report generation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cmsim/demapper.hpp"
#include "cmsim/rates.hpp"
#include "cmsim/report.hpp"
#include "cmsim/rng.hpp"
#include "cmsim/sweep.hpp"

namespace {

using namespace cmsim;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SpecOverrides {
  std::optional<std::string> channel, constellation, llr_kind, sweep_variable,
      frame_dump_dir;
  std::optional<std::string> codec_family, codec_alist_path,
      codec_puncture_file;
  std::optional<double> codec_rate, sweep_start, sweep_stop, target_post_ber;
  std::optional<int> codec_iterations, sweep_points;
  std::optional<std::size_t> frames_per_point, min_bit_errors, mi_max_samples,
      codec_info_bits;
  std::optional<std::uint64_t> master_seed, codec_interleaver_seed;
  std::optional<bool> group_codewords;

  std::optional<double> fiber_attenuation, fiber_dispersion, fiber_gamma,
      fiber_span_length, fiber_symbol_rate, fiber_nf_db, fiber_spacing,
      fiber_rolloff, fiber_step_size, fiber_launch_power_dbm,
      fiber_carrier_frequency;
  std::optional<int> fiber_n_channels, fiber_oversampling;
  std::optional<std::size_t> fiber_n_symbols;
  std::optional<bool> fiber_manakov;

  void register_flags(CLI::App* app) {
    app->add_option("--channel", channel, "awgn | fiber");
    app->add_option("--constellation", constellation,
                    "qam4|qam8|qam16|qam64|qam256 or a file path");
    app->add_option("--llr_kind", llr_kind, "exact | maxlog");
    app->add_option("--codec_family", codec_family, "ldpc | turbo");
    app->add_option("--codec_alist_path", codec_alist_path);
    app->add_option("--codec_rate", codec_rate);
    app->add_option("--codec_iterations", codec_iterations);
    app->add_option("--codec_interleaver_seed", codec_interleaver_seed);
    app->add_option("--codec_info_bits", codec_info_bits);
    app->add_option("--codec_puncture_file", codec_puncture_file);
    app->add_option("--sweep_variable", sweep_variable,
                    "rho_db | distance_km | launch_power_dbm");
    app->add_option("--sweep_start", sweep_start);
    app->add_option("--sweep_stop", sweep_stop);
    app->add_option("--sweep_points", sweep_points);
    app->add_option("--frames_per_point", frames_per_point);
    app->add_option("--min_bit_errors", min_bit_errors);
    app->add_option("--target_post_ber", target_post_ber);
    app->add_option("--master_seed", master_seed);
    app->add_option("--group_codewords", group_codewords);
    app->add_option("--mi_max_samples", mi_max_samples);
    app->add_option("--frame_dump_dir", frame_dump_dir);
    app->add_option("--fiber_attenuation", fiber_attenuation);
    app->add_option("--fiber_dispersion", fiber_dispersion);
    app->add_option("--fiber_gamma", fiber_gamma);
    app->add_option("--fiber_span_length", fiber_span_length);
    app->add_option("--fiber_symbol_rate", fiber_symbol_rate);
    app->add_option("--fiber_nf_db", fiber_nf_db);
    app->add_option("--fiber_n_channels", fiber_n_channels);
    app->add_option("--fiber_spacing", fiber_spacing);
    app->add_option("--fiber_rolloff", fiber_rolloff);
    app->add_option("--fiber_step_size", fiber_step_size);
    app->add_option("--fiber_oversampling", fiber_oversampling);
    app->add_option("--fiber_launch_power_dbm", fiber_launch_power_dbm);
    app->add_option("--fiber_n_symbols", fiber_n_symbols);
    app->add_option("--fiber_manakov", fiber_manakov);
    app->add_option("--fiber_carrier_frequency", fiber_carrier_frequency);
  }

  void apply(SweepSpec* spec) const {
    if (channel) {
      if (*channel == "awgn")
        spec->channel = ChannelKind::awgn;
      else if (*channel == "fiber")
        spec->channel = ChannelKind::fiber;
      else
        throw CLI::ValidationError("--channel", "must be awgn or fiber");
    }
    if (constellation) spec->constellation = *constellation;
    if (llr_kind) {
      if (*llr_kind == "exact")
        spec->llr_kind = LlrKind::exact;
      else if (*llr_kind == "maxlog")
        spec->llr_kind = LlrKind::maxlog;
      else
        throw CLI::ValidationError("--llr_kind", "must be exact or maxlog");
    }
    if (codec_family) spec->codec.family = *codec_family;
    if (codec_alist_path) spec->codec.alist_path = *codec_alist_path;
    if (codec_rate) spec->codec.rate = *codec_rate;
    if (codec_iterations) spec->codec.iterations = *codec_iterations;
    if (codec_interleaver_seed)
      spec->codec.interleaver_seed = *codec_interleaver_seed;
    if (codec_info_bits) spec->codec.info_bits = *codec_info_bits;
    if (codec_puncture_file) spec->codec.puncture_file = *codec_puncture_file;
    if (sweep_variable) spec->sweep_variable = *sweep_variable;
    if (sweep_start) spec->sweep_start = *sweep_start;
    if (sweep_stop) spec->sweep_stop = *sweep_stop;
    if (sweep_points) spec->sweep_points = *sweep_points;
    if (frames_per_point) spec->frames_per_point = *frames_per_point;
    if (min_bit_errors) spec->min_bit_errors = *min_bit_errors;
    if (target_post_ber) spec->target_post_ber = *target_post_ber;
    if (master_seed) spec->master_seed = *master_seed;
    if (group_codewords) spec->group_codewords = *group_codewords;
    if (mi_max_samples) spec->mi_max_samples = *mi_max_samples;
    if (frame_dump_dir) spec->frame_dump_dir = *frame_dump_dir;
    if (fiber_attenuation) spec->fiber.attenuation = *fiber_attenuation;
    if (fiber_dispersion) spec->fiber.dispersion = *fiber_dispersion;
    if (fiber_gamma) spec->fiber.gamma = *fiber_gamma;
    if (fiber_span_length) spec->fiber.span_length = *fiber_span_length;
    if (fiber_symbol_rate) spec->fiber.symbol_rate = *fiber_symbol_rate;
    if (fiber_nf_db) spec->fiber.nf_db = *fiber_nf_db;
    if (fiber_n_channels) spec->fiber.n_channels = *fiber_n_channels;
    if (fiber_spacing) spec->fiber.spacing = *fiber_spacing;
    if (fiber_rolloff) spec->fiber.rolloff = *fiber_rolloff;
    if (fiber_step_size) spec->fiber.step_size = *fiber_step_size;
    if (fiber_oversampling) spec->fiber.oversampling = *fiber_oversampling;
    if (fiber_launch_power_dbm)
      spec->fiber.launch_power_dbm = *fiber_launch_power_dbm;
    if (fiber_n_symbols) spec->fiber.n_symbols = *fiber_n_symbols;
    if (fiber_manakov) spec->fiber.manakov = *fiber_manakov;
    if (fiber_carrier_frequency)
      spec->fiber.carrier_frequency = *fiber_carrier_frequency;
  }
};

SweepSpec load_spec(const std::string& config_path,
                    const SpecOverrides& overrides) {
  SweepSpec spec;
  if (!config_path.empty()) spec = parse_sweep_spec(read_file(config_path));
  overrides.apply(&spec);
  return spec;
}

int cmd_rates(const std::string& constellation_id, const std::string& kind_str,
              double start, double stop, int points, std::size_t n,
              std::uint64_t seed, const std::string& out_path,
              const std::string& pdf_path) {
  const Constellation c = make_constellation(constellation_id);
  const LlrKind kind = kind_str == "maxlog" ? LlrKind::maxlog : LlrKind::exact;

  std::ostringstream csv;
  write_rate_csv_header(csv);
  for (int i = 0; i < points; ++i) {
    const double rho_db =
        points == 1 ? start : start + (stop - start) * i / (points - 1);
    const double rho = std::pow(10.0, rho_db / 10.0);
    const RateEstimate mi =
        estimate_mi_awgn(c, rho, n, derive_seed(seed, i, 0, 0));
    write_rate_csv_row(csv, "mi", c.name, rho_db, mi);

    StreamRng rng(derive_seed(seed, i, 1, 0));
    const AwgnFrame sim = simulate_awgn_frame(c, rho, n, rng, kind);
    const RateEstimate gmi = estimate_gmi(sim.frame);
    write_rate_csv_row(csv, kind == LlrKind::exact ? "gmi_exact" : "gmi_maxlog",
                       c.name, rho_db, gmi);
    if (!pdf_path.empty() && i == points - 1) {
      std::ofstream pf(pdf_path);
      dump_pdf_csv(pf, symmetrized_pdf(sim.frame));
    }
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv.str();
  }
  return 0;
}

int cmd_fiber_sim(const SweepSpec& spec, const std::string& wave_path,
                  const std::string& rx_path) {
  const Constellation c = make_constellation(spec.constellation);
  FiberParams fp = spec.fiber;
  fp.validate();

  std::vector<DualPolSymbols> channels(fp.n_channels);
  StreamRng data_rng(spec.master_seed, 0, 0, StreamRole::info_bits);
  for (int ch = 0; ch < fp.n_channels; ++ch)
    for (int q = 0; q < 2; ++q) {
      std::vector<std::uint8_t> bits(fp.n_symbols * c.m);
      for (auto& b : bits) b = static_cast<std::uint8_t>(data_rng.bit());
      channels[ch][q] = map_bits(bits, c);
    }

  const Waveform shaped = rrc_shape(channels, fp);
  const Waveform propagated = ssfm_propagate(shaped, fp);
  StreamRng ase_rng(spec.master_seed, 0, 0, StreamRole::ase_noise);
  const Waveform amplified = edfa(propagated, fp, ase_rng);

  if (!wave_path.empty()) {
    std::ofstream out(wave_path, std::ios::binary);
    write_waveform(out, amplified);
    std::cerr << "wrote " << wave_path << " (" << amplified.size()
              << " samples/pol @ " << amplified.sample_rate / 1e9
              << " GS/s)\n";
  }

  const int central = (fp.n_channels - 1) / 2;
  const DualPolSymbols rx = receiver_dsp(amplified, fp, channels[central]);
  std::vector<cplx> rx_all(rx[0]);
  rx_all.insert(rx_all.end(), rx[1].begin(), rx[1].end());
  std::vector<cplx> tx_all(channels[central][0]);
  tx_all.insert(tx_all.end(), channels[central][1].begin(),
                channels[central][1].end());
  const double rho = effective_snr(rx_all, tx_all);
  std::cout << "effective_snr_db," << 10.0 * std::log10(rho) << "\n";

  if (!rx_path.empty()) {
    std::ofstream out(rx_path, std::ios::binary);
    out << "pol,l,tx_re,tx_im,rx_re,rx_im\n";
    char buf[160];
    for (int q = 0; q < 2; ++q)
      for (std::size_t l = 0; l < rx[q].size(); ++l) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", q,
                      l, channels[central][q][l].real(),
                      channels[central][q][l].imag(), rx[q][l].real(),
                      rx[q][l].imag());
        out << buf;
      }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coded modulation simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path;

  // rates
  auto* rates = app.add_subcommand(
      "rates", "Monte-Carlo MI/GMI estimates over an SNR grid");
  std::string r_const = "qam16", r_kind = "exact", r_out = "-", r_pdf;
  double r_start = 0.0, r_stop = 10.0;
  int r_points = 11;
  std::size_t r_n = 100000;
  std::uint64_t r_seed = 1;
  rates->add_option("--constellation", r_const);
  rates->add_option("--llr_kind", r_kind, "exact | maxlog");
  rates->add_option("--rho_db_start", r_start);
  rates->add_option("--rho_db_stop", r_stop);
  rates->add_option("--points", r_points);
  rates->add_option("--n", r_n, "samples per point");
  rates->add_option("--seed", r_seed);
  rates->add_option("--out", r_out, "CSV path or - for stdout");
  rates->add_option("--pdf_out", r_pdf,
                    "dump the symmetrized L-value PDF of the last point");

  // ber-sweep
  auto* sweep_cmd = app.add_subcommand(
      "ber-sweep", "full encode/channel/decode sweep from a SweepSpec");
  SpecOverrides sweep_over;
  std::string sweep_out_dir = "sweep_out";
  int workers = 1;
  sweep_cmd->add_option("--config", config_path, "SweepSpec JSON file");
  sweep_cmd->add_option("--out_dir", sweep_out_dir);
  sweep_cmd->add_option("--workers", workers);
  sweep_over.register_flags(sweep_cmd);

  // fiber-sim
  auto* fiber_cmd =
      app.add_subcommand("fiber-sim", "fiber channel only, waveform out");
  SpecOverrides fiber_over;
  std::string wave_out = "waveform.bin", rx_out;
  fiber_cmd->add_option("--config", config_path, "SweepSpec JSON file");
  fiber_cmd->add_option("--waveform_out", wave_out);
  fiber_cmd->add_option("--rx_out", rx_out, "tx/rx symbol CSV");
  fiber_over.register_flags(fiber_cmd);

  // threshold
  auto* thr_cmd = app.add_subcommand(
      "threshold", "find the target post-FEC BER crossing of a sweep CSV");
  std::string thr_in, thr_out = "-", thr_const = "qam16";
  double thr_target = 4.7e-3, thr_rate = 0.5;
  bool thr_by_gmi = false;
  thr_cmd->add_option("--sweep", thr_in, "sweep CSV")->required();
  thr_cmd->add_option("--target", thr_target);
  thr_cmd->add_option("--constellation", thr_const);
  thr_cmd->add_option("--rate", thr_rate);
  thr_cmd->add_flag("--by_gmi", thr_by_gmi,
                    "order rows by normalized GMI before scanning");
  thr_cmd->add_option("--out", thr_out);

  // report
  auto* rep_cmd = app.add_subcommand(
      "report", "CSV + SVG report from a sweep CSV, optional reference table");
  std::string rep_sweep, rep_ref, rep_dir = "report_out";
  double rep_target = 4.7e-3;
  std::string rep_const = "qam16";
  double rep_rate = 0.5;
  rep_cmd->add_option("--sweep", rep_sweep, "sweep CSV")->required();
  rep_cmd->add_option("--reference", rep_ref, "reference table CSV");
  rep_cmd->add_option("--out_dir", rep_dir);
  rep_cmd->add_option("--target", rep_target);
  rep_cmd->add_option("--constellation", rep_const);
  rep_cmd->add_option("--rate", rep_rate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rates->parsed())
      return cmd_rates(r_const, r_kind, r_start, r_stop, r_points, r_n, r_seed,
                       r_out, r_pdf);

    if (sweep_cmd->parsed()) {
      const SweepSpec spec = load_spec(config_path, sweep_over);
      const std::vector<SweepRow> rows = run_sweep(spec, workers);
      ThresholdReport report;
      report.entries.push_back({spec.constellation, spec.codec.rate,
                                find_threshold(rows, spec.target_post_ber)});
      const auto written =
          emit_report(rows, report, {}, sweep_out_dir);
      for (const auto& p : written) std::cerr << "wrote " << p << "\n";
      return 0;
    }

    if (fiber_cmd->parsed()) {
      SweepSpec spec = load_spec(config_path, fiber_over);
      return cmd_fiber_sim(spec, wave_out, rx_out);
    }

    if (thr_cmd->parsed()) {
      std::ifstream in(thr_in);
      if (!in) throw std::runtime_error("cannot open " + thr_in);
      const std::vector<SweepRow> rows = read_sweep_csv(in);
      ThresholdReport report;
      const ThresholdCrossing crossing =
          thr_by_gmi ? find_threshold_by_gmi(rows, thr_target)
                     : find_threshold(rows, thr_target);
      report.entries.push_back({thr_const, thr_rate, crossing});
      std::ostringstream csv;
      write_threshold_csv(csv, report);
      if (thr_out.empty() || thr_out == "-") {
        std::cout << csv.str();
      } else {
        std::ofstream out(thr_out, std::ios::binary);
        out << csv.str();
      }
      return 0;
    }

    if (rep_cmd->parsed()) {
      std::ifstream in(rep_sweep);
      if (!in) throw std::runtime_error("cannot open " + rep_sweep);
      const std::vector<SweepRow> rows = read_sweep_csv(in);
      std::vector<ReferencePoint> overlay;
      if (!rep_ref.empty()) overlay = ingest_reference_table_file(rep_ref);
      ThresholdReport report;
      report.entries.push_back(
          {rep_const, rep_rate, find_threshold(rows, rep_target)});
      const auto written = emit_report(rows, report, overlay, rep_dir);
      for (const auto& p : written) std::cerr << "wrote " << p << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
