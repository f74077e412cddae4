#include "cmsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cmsim/fec.hpp"
#include "cmsim/interleaver.hpp"
#include "cmsim/ldpc.hpp"
#include "cmsim/rates.hpp"
#include "cmsim/turbo.hpp"

namespace cmsim {

namespace {

// adaptive stopping consumes work in fixed batches so that the stopping
// decision never depends on the worker count
constexpr std::size_t kFrameBatch = 16;
constexpr std::size_t kRunBatch = 2;

std::size_t gcd_size(std::size_t a, std::size_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

template <typename Fn>
void run_parallel(std::size_t begin, std::size_t end, int workers, Fn&& fn) {
  const std::size_t count = end > begin ? end - begin : 0;
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= end) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nts = std::min<std::size_t>(workers, count);
  for (std::size_t t = 0; t < nts; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// FEC behind one interface so the pipeline does not care about the family
class Codec {
 public:
  explicit Codec(const CodeSpec& spec) {
    if (spec.family == "ldpc") {
      if (spec.alist_path.empty())
        throw std::invalid_argument("ldpc codec requires alist_path");
      ldpc_ = std::make_shared<LdpcCode>(
          LdpcCode::load_alist_file(spec.alist_path));
      iterations_ = spec.iterations > 0 ? spec.iterations : 50;
    } else if (spec.family == "turbo") {
      const int iters = spec.iterations > 0 ? spec.iterations : 10;
      if (spec.puncture_file.empty())
        turbo_ = std::make_shared<TurboCode>(spec.info_bits, spec.rate,
                                             spec.interleaver_seed, iters);
      else
        turbo_ = std::make_shared<TurboCode>(
            spec.info_bits, spec.rate, spec.interleaver_seed,
            PuncturePattern::load_file(spec.puncture_file), iters);
    } else {
      throw std::invalid_argument("unknown codec family: " + spec.family);
    }
  }

  std::size_t wire_bits() const {
    return ldpc_ ? ldpc_->n_code() : turbo_->n_code();
  }
  std::size_t info_bits() const {
    return ldpc_ ? ldpc_->k_info() : turbo_->k_info();
  }
  double rate() const { return ldpc_ ? ldpc_->rate() : turbo_->rate(); }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const {
    return ldpc_ ? ldpc_->encode(info) : turbo_->encode(info);
  }
  DecodeResult decode(std::span<const double> wire_llrs) const {
    if (ldpc_) return ldpc_->decode(wire_llrs, iterations_);
    return turbo_->decode(turbo_->depuncture(wire_llrs));
  }

 private:
  std::shared_ptr<LdpcCode> ldpc_;
  std::shared_ptr<TurboCode> turbo_;
  int iterations_ = 50;
};

struct FrameOutcome {
  LlrFrame frame;            // mapper-order code bits and their L-values
  std::vector<int> tx_index;
  std::vector<cplx> rx;
  std::size_t errors = 0;
  std::size_t info_bits = 0;
  std::size_t codewords = 0;
  double rho = 0.0;
};

// encodes `group` codewords, interleaves them jointly and returns the
// permuted wire bits; infos receives the per-codeword information bits
std::vector<std::uint8_t> build_channel_frame(
    const SweepSpec& spec, const Codec& codec, std::size_t group,
    std::size_t point, std::size_t frame_idx, Permutation* perm,
    std::vector<std::vector<std::uint8_t>>* infos) {
  StreamRng bits_rng(spec.master_seed, point, frame_idx,
                     StreamRole::info_bits);
  std::vector<std::uint8_t> tx_bits;
  tx_bits.reserve(group * codec.wire_bits());
  for (std::size_t g = 0; g < group; ++g) {
    std::vector<std::uint8_t> info(codec.info_bits());
    for (auto& b : info) b = static_cast<std::uint8_t>(bits_rng.bit());
    const std::vector<std::uint8_t> cw = codec.encode(info);
    tx_bits.insert(tx_bits.end(), cw.begin(), cw.end());
    infos->push_back(std::move(info));
  }
  *perm = make_permutation(
      tx_bits.size(), derive_seed(spec.master_seed, point, frame_idx,
                                  static_cast<std::uint64_t>(
                                      StreamRole::interleaver)));
  return perm->interleave<std::uint8_t>(tx_bits);
}

void decode_channel_frame(const Codec& codec, const Permutation& perm,
                          std::span<const double> llrs,
                          const std::vector<std::vector<std::uint8_t>>& infos,
                          FrameOutcome* out) {
  const std::vector<double> plain = perm.deinterleave<double>(llrs);
  const std::size_t wire = codec.wire_bits();
  for (std::size_t g = 0; g < infos.size(); ++g) {
    DecodeResult r = codec.decode(
        std::span<const double>{plain.data() + g * wire, wire});
    out->errors += score_result(r, infos[g]);
    out->info_bits += infos[g].size();
    out->codewords += 1;
  }
}

FrameOutcome awgn_frame(const SweepSpec& spec, const Constellation& c,
                        const Codec& codec, std::size_t group,
                        std::size_t point, std::size_t frame_idx, double rho) {
  FrameOutcome out;
  out.rho = rho;
  Permutation perm;
  std::vector<std::vector<std::uint8_t>> infos;
  const std::vector<std::uint8_t> tx_perm =
      build_channel_frame(spec, codec, group, point, frame_idx, &perm, &infos);

  out.tx_index = map_bits_to_indices(tx_perm, c);
  const std::size_t n_sym = out.tx_index.size();
  out.rx.resize(n_sym);
  StreamRng noise_rng(spec.master_seed, point, frame_idx,
                      StreamRole::channel_noise);
  const double noise_var = 1.0 / rho;
  for (std::size_t l = 0; l < n_sym; ++l)
    out.rx[l] = c.points[out.tx_index[l]] + noise_rng.complex_gaussian(noise_var);

  out.frame.m = c.m;
  out.frame.n = n_sym;
  out.frame.kind = spec.llr_kind;
  out.frame.bits = tx_perm;
  out.frame.llrs = demap(out.rx, rho, c, spec.llr_kind);

  decode_channel_frame(codec, perm, out.frame.llrs, infos, &out);
  return out;
}

std::vector<cplx> random_symbols(const Constellation& c, std::size_t n,
                                 StreamRng& rng) {
  std::vector<std::uint8_t> bits(n * c.m);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return map_bits(bits, c);
}

FrameOutcome fiber_run(const SweepSpec& spec, const Constellation& c,
                       const Codec& codec, std::size_t group,
                       std::size_t point, std::size_t run_idx,
                       const FiberParams& fp, std::size_t frames_per_run) {
  const std::size_t frame_bits = group * codec.wire_bits();
  const std::size_t total_bits = 2 * fp.n_symbols * c.m;
  const std::size_t code_bits = frames_per_run * frame_bits;

  std::vector<std::uint8_t> tx_stream;
  tx_stream.reserve(total_bits);
  std::vector<Permutation> perms(frames_per_run);
  std::vector<std::vector<std::vector<std::uint8_t>>> infos(frames_per_run);
  for (std::size_t j = 0; j < frames_per_run; ++j) {
    const std::size_t frame_idx = run_idx * frames_per_run + j;
    const std::vector<std::uint8_t> tx_perm = build_channel_frame(
        spec, codec, group, point, frame_idx, &perms[j], &infos[j]);
    tx_stream.insert(tx_stream.end(), tx_perm.begin(), tx_perm.end());
  }
  StreamRng filler_rng(spec.master_seed, point, run_idx,
                       StreamRole::filler_bits);
  while (tx_stream.size() < total_bits)
    tx_stream.push_back(static_cast<std::uint8_t>(filler_rng.bit()));

  const std::vector<int> tx_index = map_bits_to_indices(tx_stream, c);
  std::vector<cplx> tx_symbols(tx_index.size());
  for (std::size_t l = 0; l < tx_index.size(); ++l)
    tx_symbols[l] = c.points[tx_index[l]];

  const int central = (fp.n_channels - 1) / 2;
  std::vector<DualPolSymbols> channels(fp.n_channels);
  StreamRng neighbor_rng(spec.master_seed, point, run_idx,
                         StreamRole::neighbor_data);
  for (int ch = 0; ch < fp.n_channels; ++ch) {
    if (ch == central) {
      channels[ch][0].assign(tx_symbols.begin(),
                             tx_symbols.begin() + fp.n_symbols);
      channels[ch][1].assign(tx_symbols.begin() + fp.n_symbols,
                             tx_symbols.end());
    } else {
      channels[ch][0] = random_symbols(c, fp.n_symbols, neighbor_rng);
      channels[ch][1] = random_symbols(c, fp.n_symbols, neighbor_rng);
    }
  }

  const Waveform shaped = rrc_shape(channels, fp);
  const Waveform propagated = ssfm_propagate(shaped, fp);
  StreamRng ase_rng(spec.master_seed, point, run_idx, StreamRole::ase_noise);
  const Waveform amplified = edfa(propagated, fp, ase_rng);
  const DualPolSymbols rx2 = receiver_dsp(amplified, fp, channels[central]);

  std::vector<cplx> rx_stream;
  rx_stream.reserve(tx_symbols.size());
  rx_stream.insert(rx_stream.end(), rx2[0].begin(), rx2[0].end());
  rx_stream.insert(rx_stream.end(), rx2[1].begin(), rx2[1].end());

  FrameOutcome out;
  out.rho = effective_snr(rx_stream, tx_symbols);

  const std::size_t code_syms = code_bits / c.m;
  out.tx_index.assign(tx_index.begin(), tx_index.begin() + code_syms);
  out.rx.assign(rx_stream.begin(), rx_stream.begin() + code_syms);
  out.frame.m = c.m;
  out.frame.n = code_syms;
  out.frame.kind = spec.llr_kind;
  out.frame.bits.assign(tx_stream.begin(), tx_stream.begin() + code_bits);
  out.frame.llrs = demap(out.rx, out.rho, c, spec.llr_kind);

  for (std::size_t j = 0; j < frames_per_run; ++j) {
    std::span<const double> slice{out.frame.llrs.data() + j * frame_bits,
                                  frame_bits};
    decode_channel_frame(codec, perms[j], slice, infos[j], &out);
  }
  return out;
}

SweepRow finalize_row(const SweepSpec& spec, const Constellation& c,
                      double sweep_value, std::vector<FrameOutcome>& outcomes,
                      std::size_t point_idx) {
  LlrFrame pooled;
  std::vector<int> tx_index;
  std::vector<cplx> rx;
  std::size_t errors = 0, info_bits = 0, codewords = 0;
  for (FrameOutcome& o : outcomes) {
    pooled.append(o.frame);
    errors += o.errors;
    info_bits += o.info_bits;
    codewords += o.codewords;
    if (tx_index.size() < spec.mi_max_samples) {
      const std::size_t room = spec.mi_max_samples - tx_index.size();
      const std::size_t take = std::min(room, o.tx_index.size());
      tx_index.insert(tx_index.end(), o.tx_index.begin(),
                      o.tx_index.begin() + take);
      rx.insert(rx.end(), o.rx.begin(), o.rx.begin() + take);
    }
  }

  SweepRow row;
  row.sweep_value = sweep_value;
  row.frames = codewords;
  row.info_bits = info_bits;
  row.pre_ber = pre_fec_ber(pooled);

  std::vector<cplx> tx(tx_index.size());
  for (std::size_t l = 0; l < tx_index.size(); ++l)
    tx[l] = c.points[tx_index[l]];
  row.rho_effective = spec.channel == ChannelKind::awgn
                          ? outcomes.front().rho
                          : effective_snr(rx, tx);

  const RateEstimate mi = mi_from_pairs(c, row.rho_effective, tx_index, rx);
  row.mi_norm = mi.value / c.m;
  const RateEstimate gmi = estimate_gmi(pooled);
  row.gmi_norm = gmi.value / c.m;
  row.s_star = gmi.s_star;

  row.post_ber = info_bits > 0
                     ? static_cast<double>(errors) / static_cast<double>(info_bits)
                     : 0.0;
  wilson_interval(errors, info_bits, &row.post_ber_ci_lo, &row.post_ber_ci_hi);

  if (!spec.frame_dump_dir.empty()) {
    std::filesystem::create_directories(spec.frame_dump_dir);
    char name[64];
    std::snprintf(name, sizeof(name), "point_%03zu.csv", point_idx);
    std::ofstream out(std::filesystem::path(spec.frame_dump_dir) / name);
    dump_llr_frame_csv(out, pooled);
  }
  return row;
}

}  // namespace

std::vector<double> SweepSpec::sweep_values() const {
  std::vector<double> values;
  if (sweep_points == 1) {
    values.push_back(sweep_start);
    return values;
  }
  for (int i = 0; i < sweep_points; ++i)
    values.push_back(sweep_start +
                     (sweep_stop - sweep_start) * i / (sweep_points - 1));
  return values;
}

void SweepSpec::validate() const {
  if (sweep_points < 1) throw std::invalid_argument("empty sweep range");
  if (frames_per_point < 1)
    throw std::invalid_argument("frames_per_point must be at least 1");
  static const std::set<std::string> vars = {"rho_db", "distance_km",
                                             "launch_power_dbm"};
  if (!vars.count(sweep_variable))
    throw std::invalid_argument("unknown sweep_variable: " + sweep_variable);
  if (channel == ChannelKind::awgn && sweep_variable != "rho_db")
    throw std::invalid_argument("AWGN sweeps use rho_db");
  if (channel == ChannelKind::fiber && sweep_variable == "rho_db")
    throw std::invalid_argument("fiber sweeps use distance_km or launch power");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  const Constellation c = make_constellation(spec.constellation);
  const Codec codec(spec.codec);

  const std::size_t wire = codec.wire_bits();
  std::size_t group = 1;
  if (wire % c.m != 0) {
    if (!spec.group_codewords)
      throw std::invalid_argument(
          "codeword length is not divisible by bits per symbol");
    group = static_cast<std::size_t>(c.m) / gcd_size(wire % c.m, c.m);
    while ((group * wire) % c.m != 0) ++group;  // safety net
  }

  std::vector<SweepRow> rows;
  const std::vector<double> values = spec.sweep_values();
  for (std::size_t pt = 0; pt < values.size(); ++pt) {
    const double v = values[pt];
    std::vector<FrameOutcome> outcomes;
    std::mutex merge_mu;

    if (spec.channel == ChannelKind::awgn) {
      const double rho = std::pow(10.0, v / 10.0);
      std::size_t done = 0, errors = 0;
      std::size_t batch_frames = std::min<std::size_t>(
          kFrameBatch, spec.frames_per_point);
      while (done < spec.frames_per_point) {
        const std::size_t end =
            std::min(done + batch_frames, spec.frames_per_point);
        std::vector<FrameOutcome> batch(end - done);
        run_parallel(done, end, workers, [&](std::size_t f) {
          FrameOutcome o = awgn_frame(spec, c, codec, group, pt, f, rho);
          std::lock_guard<std::mutex> lock(merge_mu);
          batch[f - done] = std::move(o);
        });
        for (FrameOutcome& o : batch) {
          errors += o.errors;
          outcomes.push_back(std::move(o));
        }
        done = end;
        if (errors >= spec.min_bit_errors) break;
      }
    } else {
      FiberParams fp = spec.fiber;
      if (spec.sweep_variable == "distance_km")
        fp.span_length = v;
      else
        fp.launch_power_dbm = v;
      fp.validate();
      const std::size_t frame_bits = group * wire;
      const std::size_t frames_per_run = 2 * fp.n_symbols * c.m / frame_bits;
      if (frames_per_run == 0)
        throw std::invalid_argument(
            "fiber block too short for one codeword; raise n_symbols");
      const std::size_t runs_budget =
          (spec.frames_per_point + frames_per_run - 1) / frames_per_run;
      std::size_t done = 0, errors = 0;
      while (done < runs_budget) {
        const std::size_t end = std::min(done + kRunBatch, runs_budget);
        std::vector<FrameOutcome> batch(end - done);
        run_parallel(done, end, workers, [&](std::size_t r) {
          FrameOutcome o =
              fiber_run(spec, c, codec, group, pt, r, fp, frames_per_run);
          std::lock_guard<std::mutex> lock(merge_mu);
          batch[r - done] = std::move(o);
        });
        for (FrameOutcome& o : batch) {
          errors += o.errors;
          outcomes.push_back(std::move(o));
        }
        done = end;
        if (errors >= spec.min_bit_errors) break;
      }
    }

    rows.push_back(finalize_row(spec, c, v, outcomes, pt));
  }
  return rows;
}

namespace {

double log_interp(double x0, double x1, double p0, double p1, double target,
                  double floor_p) {
  const double lp0 = std::log(std::max(p0, floor_p));
  const double lp1 = std::log(std::max(p1, floor_p));
  const double lt = std::log(target);
  if (lp0 == lp1) return 0.5 * (x0 + x1);
  const double u = (lt - lp0) / (lp1 - lp0);
  return x0 + u * (x1 - x0);
}

ThresholdCrossing threshold_scan(std::span<const SweepRow> rows,
                                 double target) {
  ThresholdCrossing out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double p0 = rows[i].post_ber;
    const double p1 = rows[i + 1].post_ber;
    const bool down = p0 >= target && p1 < target;
    const bool up = p0 < target && p1 >= target;
    if (!down && !up) continue;
    const double floor_p =
        0.3 / static_cast<double>(std::max<std::size_t>(
                  1, std::max(rows[i].info_bits, rows[i + 1].info_bits)));
    out.crossed = true;
    out.sweep_value = log_interp(rows[i].sweep_value, rows[i + 1].sweep_value,
                                 p0, p1, target, floor_p);
    out.pre_ber = log_interp(rows[i].pre_ber, rows[i + 1].pre_ber, p0, p1,
                             target, floor_p);
    out.mi_norm = log_interp(rows[i].mi_norm, rows[i + 1].mi_norm, p0, p1,
                             target, floor_p);
    out.gmi_norm = log_interp(rows[i].gmi_norm, rows[i + 1].gmi_norm, p0, p1,
                              target, floor_p);
    return out;
  }
  return out;
}

}  // namespace

ThresholdCrossing find_threshold(std::span<const SweepRow> rows,
                                 double target) {
  if (rows.size() < 2) return {};
  return threshold_scan(rows, target);
}

ThresholdCrossing find_threshold_by_gmi(std::span<const SweepRow> rows,
                                        double target) {
  std::vector<SweepRow> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const SweepRow& a, const SweepRow& b) {
              return a.gmi_norm < b.gmi_norm;
            });
  return find_threshold(sorted, target);
}

PredictorSpread prediction_spread(const ThresholdReport& report) {
  std::vector<const ThresholdCrossing*> xs;
  for (const auto& e : report.entries)
    if (e.crossing.crossed) xs.push_back(&e.crossing);
  if (xs.size() < 2)
    throw std::invalid_argument("need at least two crossed thresholds");
  auto span_of = [&](auto field) {
    double lo = 1e300, hi = -1e300, sum = 0.0;
    for (const ThresholdCrossing* x : xs) {
      const double v = x->*field;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / static_cast<double>(xs.size());
    return std::pair<double, double>{hi - lo,
                                     mean != 0.0 ? (hi - lo) / mean : 0.0};
  };
  PredictorSpread s;
  std::tie(s.pre_ber, s.pre_ber_rel) = span_of(&ThresholdCrossing::pre_ber);
  std::tie(s.mi_norm, s.mi_norm_rel) = span_of(&ThresholdCrossing::mi_norm);
  std::tie(s.gmi_norm, s.gmi_norm_rel) = span_of(&ThresholdCrossing::gmi_norm);
  return s;
}

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
}

FiberParams fiber_from_json(const json& j) {
  static const std::set<std::string> keys = {
      "attenuation", "dispersion", "gamma", "span_length", "pmd",
      "symbol_rate", "nf_db", "n_channels", "spacing", "rolloff",
      "step_size", "oversampling", "launch_power_dbm", "n_symbols",
      "manakov", "carrier_frequency"};
  check_keys(j, keys, "fiber");
  FiberParams p;
  p.attenuation = j.value("attenuation", p.attenuation);
  p.dispersion = j.value("dispersion", p.dispersion);
  p.gamma = j.value("gamma", p.gamma);
  p.span_length = j.value("span_length", p.span_length);
  p.pmd = j.value("pmd", p.pmd);
  p.symbol_rate = j.value("symbol_rate", p.symbol_rate);
  p.nf_db = j.value("nf_db", p.nf_db);
  p.n_channels = j.value("n_channels", p.n_channels);
  p.spacing = j.value("spacing", p.spacing);
  p.rolloff = j.value("rolloff", p.rolloff);
  p.step_size = j.value("step_size", p.step_size);
  p.oversampling = j.value("oversampling", p.oversampling);
  p.launch_power_dbm = j.value("launch_power_dbm", p.launch_power_dbm);
  p.n_symbols = j.value("n_symbols", p.n_symbols);
  p.manakov = j.value("manakov", p.manakov);
  p.carrier_frequency = j.value("carrier_frequency", p.carrier_frequency);
  return p;
}

json fiber_to_json(const FiberParams& p) {
  json j;
  j["attenuation"] = p.attenuation;
  j["dispersion"] = p.dispersion;
  j["gamma"] = p.gamma;
  j["span_length"] = p.span_length;
  j["pmd"] = p.pmd;
  j["symbol_rate"] = p.symbol_rate;
  j["nf_db"] = p.nf_db;
  j["n_channels"] = p.n_channels;
  j["spacing"] = p.spacing;
  j["rolloff"] = p.rolloff;
  j["step_size"] = p.step_size;
  j["oversampling"] = p.oversampling;
  j["launch_power_dbm"] = p.launch_power_dbm;
  j["n_symbols"] = p.n_symbols;
  j["manakov"] = p.manakov;
  j["carrier_frequency"] = p.carrier_frequency;
  return j;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  const json j = json::parse(json_text);
  static const std::set<std::string> keys = {
      "channel", "constellation", "llr_kind", "codec", "sweep_variable",
      "sweep_start", "sweep_stop", "sweep_points", "frames_per_point",
      "min_bit_errors", "target_post_ber", "master_seed", "group_codewords",
      "mi_max_samples", "frame_dump_dir", "fiber"};
  check_keys(j, keys, "sweep spec");

  SweepSpec spec;
  const std::string channel = j.value("channel", "awgn");
  if (channel == "awgn")
    spec.channel = ChannelKind::awgn;
  else if (channel == "fiber")
    spec.channel = ChannelKind::fiber;
  else
    throw std::invalid_argument("unknown channel: " + channel);
  spec.constellation = j.value("constellation", spec.constellation);
  const std::string kind = j.value("llr_kind", "exact");
  if (kind == "exact")
    spec.llr_kind = LlrKind::exact;
  else if (kind == "maxlog")
    spec.llr_kind = LlrKind::maxlog;
  else
    throw std::invalid_argument("unknown llr_kind: " + kind);

  if (j.contains("codec")) {
    const json& cj = j["codec"];
    static const std::set<std::string> ckeys = {
        "family", "alist_path", "rate", "iterations", "interleaver_seed",
        "info_bits", "puncture_file"};
    check_keys(cj, ckeys, "codec");
    spec.codec.family = cj.value("family", spec.codec.family);
    spec.codec.alist_path = cj.value("alist_path", spec.codec.alist_path);
    spec.codec.rate = cj.value("rate", spec.codec.rate);
    spec.codec.iterations = cj.value("iterations", spec.codec.iterations);
    spec.codec.interleaver_seed =
        cj.value("interleaver_seed", spec.codec.interleaver_seed);
    spec.codec.info_bits = cj.value("info_bits", spec.codec.info_bits);
    spec.codec.puncture_file =
        cj.value("puncture_file", spec.codec.puncture_file);
  }

  spec.sweep_variable = j.value("sweep_variable", spec.sweep_variable);
  spec.sweep_start = j.value("sweep_start", spec.sweep_start);
  spec.sweep_stop = j.value("sweep_stop", spec.sweep_stop);
  spec.sweep_points = j.value("sweep_points", spec.sweep_points);
  spec.frames_per_point = j.value("frames_per_point", spec.frames_per_point);
  spec.min_bit_errors = j.value("min_bit_errors", spec.min_bit_errors);
  spec.target_post_ber = j.value("target_post_ber", spec.target_post_ber);
  spec.master_seed = j.value("master_seed", spec.master_seed);
  spec.group_codewords = j.value("group_codewords", spec.group_codewords);
  spec.mi_max_samples = j.value("mi_max_samples", spec.mi_max_samples);
  spec.frame_dump_dir = j.value("frame_dump_dir", spec.frame_dump_dir);
  if (j.contains("fiber")) spec.fiber = fiber_from_json(j["fiber"]);
  return spec;
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
  json j;
  j["channel"] = spec.channel == ChannelKind::awgn ? "awgn" : "fiber";
  j["constellation"] = spec.constellation;
  j["llr_kind"] = spec.llr_kind == LlrKind::exact ? "exact" : "maxlog";
  json cj;
  cj["family"] = spec.codec.family;
  cj["alist_path"] = spec.codec.alist_path;
  cj["rate"] = spec.codec.rate;
  cj["iterations"] = spec.codec.iterations;
  cj["interleaver_seed"] = spec.codec.interleaver_seed;
  cj["info_bits"] = spec.codec.info_bits;
  cj["puncture_file"] = spec.codec.puncture_file;
  j["codec"] = cj;
  j["sweep_variable"] = spec.sweep_variable;
  j["sweep_start"] = spec.sweep_start;
  j["sweep_stop"] = spec.sweep_stop;
  j["sweep_points"] = spec.sweep_points;
  j["frames_per_point"] = spec.frames_per_point;
  j["min_bit_errors"] = spec.min_bit_errors;
  j["target_post_ber"] = spec.target_post_ber;
  j["master_seed"] = spec.master_seed;
  j["group_codewords"] = spec.group_codewords;
  j["mi_max_samples"] = spec.mi_max_samples;
  j["frame_dump_dir"] = spec.frame_dump_dir;
  j["fiber"] = fiber_to_json(spec.fiber);
  return j.dump(2) + "\n";
}

}  // namespace cmsim
