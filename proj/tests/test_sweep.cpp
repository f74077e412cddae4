#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmsim/demapper.hpp"
#include "cmsim/report.hpp"
#include "cmsim/sweep.hpp"

using namespace cmsim;

namespace {

const std::string kN648Path =
    std::string(CMSIM_DATA_DIR) + "/codes/ira_n648_r12.alist";

SweepSpec small_awgn_spec() {
  SweepSpec spec;
  spec.channel = ChannelKind::awgn;
  spec.constellation = "qam4";
  spec.llr_kind = LlrKind::exact;
  spec.codec.family = "ldpc";
  spec.codec.alist_path = kN648Path;
  spec.codec.rate = 0.5;
  spec.sweep_variable = "rho_db";
  spec.sweep_start = 1.0;
  spec.sweep_stop = 4.0;
  spec.sweep_points = 2;
  spec.frames_per_point = 16;
  spec.min_bit_errors = 50;
  spec.master_seed = 99;
  return spec;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("spec validation") {
  SweepSpec spec = small_awgn_spec();
  spec.sweep_points = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_awgn_spec();
  spec.sweep_variable = "launch_power_dbm";
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_awgn_spec();
  spec.sweep_variable = "voltage";
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("degenerate single-point sweep returns one row") {
  SweepSpec spec = small_awgn_spec();
  spec.sweep_points = 1;
  spec.sweep_start = spec.sweep_stop = 6.0;
  spec.frames_per_point = 2;
  const std::vector<SweepRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].sweep_value == 6.0);
}

TEST_CASE("high-SNR endpoint decodes cleanly above the code rate") {
  SweepSpec spec = small_awgn_spec();
  spec.sweep_points = 1;
  spec.sweep_start = spec.sweep_stop = 6.0;
  spec.frames_per_point = 4;
  const std::vector<SweepRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].post_ber == 0.0);
  CHECK(rows[0].gmi_norm > 0.5);
  CHECK(rows[0].pre_ber < 0.05);
  CHECK(rows[0].mi_norm >= rows[0].gmi_norm - 0.01);
}

TEST_CASE("non-divisible codec needs codeword grouping") {
  // a turbo frame of 2*971+6 = 1948 wire bits does not divide into 8QAM
  // symbols; three grouped codewords do
  SweepSpec spec = small_awgn_spec();
  spec.codec.family = "turbo";
  spec.codec.rate = 0.5;
  spec.codec.info_bits = 971;
  spec.constellation = "qam8";
  spec.sweep_points = 1;
  spec.sweep_start = spec.sweep_stop = 8.0;
  spec.frames_per_point = 1;
  spec.group_codewords = false;
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  spec.group_codewords = true;
  const std::vector<SweepRow> rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].post_ber == 0.0);
}

TEST_CASE("rerunning with a different worker count is byte-identical") {
  SweepSpec spec = small_awgn_spec();
  const std::string a = rows_to_csv(run_sweep(spec, 1));
  const std::string b = rows_to_csv(run_sweep(spec, 4));
  CHECK(a == b);
}

TEST_CASE("dumped frames reproduce the row's pre-FEC BER exactly") {
  SweepSpec spec = small_awgn_spec();
  spec.sweep_points = 1;
  spec.sweep_start = spec.sweep_stop = 2.0;
  spec.frames_per_point = 4;
  spec.frame_dump_dir = "/tmp/cmsim_test_dump";
  std::filesystem::remove_all(spec.frame_dump_dir);
  const std::vector<SweepRow> rows = run_sweep(spec);
  std::ifstream in(spec.frame_dump_dir + "/point_000.csv");
  REQUIRE(in);
  const LlrFrame frame = load_llr_frame_csv(in);
  CHECK(pre_fec_ber(frame) == rows[0].pre_ber);
}

TEST_CASE("turbo rate 1/3 threshold sits near pre-FEC BER 0.2") {
  SweepSpec spec;
  spec.constellation = "qam4";
  spec.codec.family = "turbo";
  spec.codec.rate = 1.0 / 3.0;
  spec.codec.info_bits = 10000;
  spec.sweep_start = -2.0;
  spec.sweep_stop = -0.8;
  spec.sweep_points = 4;
  spec.frames_per_point = 32;
  spec.min_bit_errors = 100;
  spec.master_seed = 31;
  const std::vector<SweepRow> rows = run_sweep(spec, 2);
  const ThresholdCrossing x = find_threshold(rows, 4.7e-3);
  REQUIRE(x.crossed);
  CHECK(x.pre_ber > 0.15);
  CHECK(x.pre_ber < 0.25);
}

TEST_CASE("GMI predicts the turbo rate-1/3 threshold across formats") {
  // the required GMI/m collapses across constellations while the required
  // MI/m and pre-FEC BER wander
  struct Format {
    const char* constellation;
    LlrKind kind;
  };
  const Format formats[] = {{"qam4", LlrKind::exact},
                            {"qam8", LlrKind::maxlog},
                            {"qam64", LlrKind::exact}};
  ThresholdReport report;
  for (const Format& f : formats) {
    const Constellation c = make_constellation(f.constellation);
    // bisect the SNR where GMI/m reaches the code's operating point
    double lo = -6.0, hi = 18.0;
    for (int it = 0; it < 18; ++it) {
      const double mid = 0.5 * (lo + hi);
      StreamRng rng(derive_seed(32, c.m, it, 0));
      const AwgnFrame sim = simulate_awgn_frame(
          c, std::pow(10.0, mid / 10.0), 20000, rng, f.kind);
      (estimate_gmi(sim.frame).value / c.m < 1.0 / 3.0 + 0.065 ? lo : hi) =
          mid;
    }
    SweepSpec spec;
    spec.constellation = f.constellation;
    spec.llr_kind = f.kind;
    spec.codec.family = "turbo";
    spec.codec.rate = 1.0 / 3.0;
    spec.codec.info_bits = 4000;
    spec.sweep_start = 0.5 * (lo + hi) - 1.0;
    spec.sweep_stop = 0.5 * (lo + hi) + 1.0;
    spec.sweep_points = 5;
    spec.frames_per_point = 24;
    spec.min_bit_errors = 80;
    spec.master_seed = 33;
    const std::vector<SweepRow> rows = run_sweep(spec, 2);
    const ThresholdCrossing x = find_threshold(rows, 4.7e-3);
    REQUIRE(x.crossed);
    report.entries.push_back({f.constellation, spec.codec.rate, x});
  }
  const PredictorSpread s = prediction_spread(report);
  CHECK(s.gmi_norm_rel < s.mi_norm_rel);
  CHECK(s.gmi_norm_rel < s.pre_ber_rel);
}

TEST_CASE("a custom puncture pattern file overrides the builtin") {
  const std::string path = "/tmp/cmsim_pattern.txt";
  {
    std::ofstream f(path);
    f << "10\n01\n";  // the builtin rate-1/2 pattern
  }
  SweepSpec spec;
  spec.constellation = "qam4";
  spec.codec.family = "turbo";
  spec.codec.rate = 0.5;
  spec.codec.info_bits = 1024;
  spec.codec.puncture_file = path;
  spec.sweep_points = 1;
  spec.sweep_start = spec.sweep_stop = 6.0;
  spec.frames_per_point = 2;
  const std::vector<SweepRow> rows = run_sweep(spec);
  CHECK(rows[0].post_ber == 0.0);
}

TEST_CASE("threshold interpolation") {
  SUBCASE("bracketed crossing lands between the rows") {
    std::vector<SweepRow> rows(2);
    rows[0].post_ber = 1e-1;
    rows[0].gmi_norm = 0.5;
    rows[0].info_bits = 100000;
    rows[1].post_ber = 1e-4;
    rows[1].gmi_norm = 0.6;
    rows[1].info_bits = 100000;
    const ThresholdCrossing x = find_threshold(rows, 4.7e-3);
    REQUIRE(x.crossed);
    CHECK(x.gmi_norm > 0.5);
    CHECK(x.gmi_norm < 0.6);
    const double u = (std::log(4.7e-3) - std::log(1e-1)) /
                     (std::log(1e-4) - std::log(1e-1));
    CHECK(x.gmi_norm == doctest::Approx(0.5 + 0.1 * u).epsilon(1e-12));
  }
  SUBCASE("no bracket means not crossed") {
    std::vector<SweepRow> rows(3);
    for (int i = 0; i < 3; ++i) {
      rows[i].post_ber = 1e-5 / (i + 1);
      rows[i].gmi_norm = 0.5 + 0.1 * i;
    }
    CHECK(!find_threshold(rows, 4.7e-3).crossed);
  }
  SUBCASE("exact exponential decay interpolates to the analytic crossing") {
    // post = exp(-8 x): crossing at x* = -ln(target)/8
    std::vector<SweepRow> rows;
    for (double x = 0.2; x <= 1.01; x += 0.2) {
      SweepRow r;
      r.sweep_value = x;
      r.gmi_norm = x;
      r.post_ber = std::exp(-8.0 * x);
      r.info_bits = 1000000;
      rows.push_back(r);
    }
    const double target = 4.7e-3;
    const ThresholdCrossing x = find_threshold(rows, target);
    REQUIRE(x.crossed);
    CHECK(std::abs(x.gmi_norm - (-std::log(target) / 8.0)) < 1e-3);
  }
  SUBCASE("gmi ordering handles non-monotone launch-power sweeps") {
    std::vector<SweepRow> rows(4);
    const double post[] = {1e-1, 1e-4, 1e-4, 1e-1};
    const double gmi[] = {0.50, 0.62, 0.60, 0.48};
    for (int i = 0; i < 4; ++i) {
      rows[i].post_ber = post[i];
      rows[i].gmi_norm = gmi[i];
      rows[i].info_bits = 100000;
    }
    const ThresholdCrossing x = find_threshold_by_gmi(rows, 4.7e-3);
    REQUIRE(x.crossed);
    CHECK(x.gmi_norm > 0.48);
    CHECK(x.gmi_norm < 0.62);
  }
}

TEST_CASE("prediction spread") {
  ThresholdReport report;
  for (int i = 0; i < 3; ++i) {
    ThresholdReport::Entry e;
    e.constellation = "c" + std::to_string(i);
    e.rate = 0.5;
    e.crossing.crossed = true;
    e.crossing.pre_ber = 0.1;
    e.crossing.mi_norm = 0.6;
    e.crossing.gmi_norm = 0.55;
    report.entries.push_back(e);
  }
  SUBCASE("identical curves have zero spread") {
    const PredictorSpread s = prediction_spread(report);
    CHECK(s.pre_ber == 0.0);
    CHECK(s.mi_norm == 0.0);
    CHECK(s.gmi_norm == 0.0);
  }
  SUBCASE("a known offset shows up as the spread") {
    report.entries[2].crossing.gmi_norm = 0.60;
    const PredictorSpread s = prediction_spread(report);
    CHECK(s.gmi_norm == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("fewer than two crossings is an error") {
    ThresholdReport bad;
    bad.entries.push_back(report.entries[0]);
    CHECK_THROWS_AS(prediction_spread(bad), std::invalid_argument);
  }
}

TEST_CASE("reference table") {
  const std::string path =
      std::string(CMSIM_DATA_DIR) + "/reference/testbed_points.csv";
  const std::vector<ReferencePoint> points =
      ingest_reference_table_file(path);
  REQUIRE(points.size() == 20);
  CHECK(points[0].launch_power_dbm == doctest::Approx(-18.27));
  CHECK(points[0].gmi_norm == doctest::Approx(0.39));
  CHECK(points[0].post_ber == doctest::Approx(1.7e-1));
  CHECK(points[0].n_spans == 16);
  CHECK(points[0].code_rate == doctest::Approx(0.4));

  SUBCASE("round trip preserves every row") {
    std::ostringstream out;
    write_reference_table(out, points);
    std::istringstream in(out.str());
    const std::vector<ReferencePoint> back = ingest_reference_table(in);
    REQUIRE(back.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(back[i].launch_power_dbm == points[i].launch_power_dbm);
      CHECK(back[i].gmi_norm == points[i].gmi_norm);
      CHECK(back[i].post_ber == points[i].post_ber);
      CHECK(back[i].n_spans == points[i].n_spans);
      CHECK(back[i].code_rate == points[i].code_rate);
    }
  }
  SUBCASE("header-only input gives an empty overlay") {
    std::istringstream in(
        "launch_power_dbm,gmi_norm,post_ber,n_spans,code_rate\n");
    CHECK(ingest_reference_table(in).empty());
  }
  SUBCASE("schema mismatch is an error") {
    std::istringstream in("power,gmi\n1,2\n");
    CHECK_THROWS_AS(ingest_reference_table(in), std::runtime_error);
  }
}

TEST_CASE("report emission") {
  std::vector<SweepRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].sweep_value = i;
    rows[i].pre_ber = 0.1 / (i + 1);
    rows[i].mi_norm = 0.5 + 0.1 * i;
    rows[i].gmi_norm = 0.45 + 0.1 * i;
    rows[i].s_star = 1.0;
    rows[i].post_ber = std::pow(10.0, -1.0 - 2.0 * i);
    rows[i].frames = 16;
  }
  ThresholdReport thresholds;
  thresholds.entries.push_back({"qam16", 0.5, find_threshold(rows, 4.7e-3)});

  const std::string dir_a = "/tmp/cmsim_report_a";
  const std::string dir_b = "/tmp/cmsim_report_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  const auto written_a = emit_report(rows, thresholds, {}, dir_a);
  const auto written_b = emit_report(rows, thresholds, {}, dir_b);
  REQUIRE(written_a.size() == written_b.size());
  CHECK(written_a.size() == 5);  // 2 CSVs + 3 SVGs

  SUBCASE("regeneration is byte-identical") {
    for (std::size_t i = 0; i < written_a.size(); ++i) {
      std::ifstream fa(written_a[i], std::ios::binary);
      std::ifstream fb(written_b[i], std::ios::binary);
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      CHECK(sa.str() == sb.str());
      CHECK(!sa.str().empty());
    }
  }
  SUBCASE("empty rows produce a header-only CSV") {
    const std::string dir_c = "/tmp/cmsim_report_c";
    std::filesystem::remove_all(dir_c);
    emit_report({}, ThresholdReport{}, {}, dir_c);
    std::ifstream f(dir_c + "/sweep.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line.rfind("sweep_var,", 0) == 0);
    CHECK(!std::getline(f, line));
  }
}

TEST_CASE("sweep CSV round trip") {
  std::vector<SweepRow> rows(2);
  rows[0].sweep_value = 1.25;
  rows[0].pre_ber = 0.123456789012345;
  rows[0].gmi_norm = 0.5;
  rows[0].post_ber = 3.14e-3;
  rows[0].frames = 7;
  rows[1].sweep_value = 2.5;
  rows[1].post_ber = 0.0;
  rows[1].frames = 9;
  std::ostringstream out;
  write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  const std::vector<SweepRow> back = read_sweep_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].pre_ber == rows[0].pre_ber);
  CHECK(back[0].sweep_value == rows[0].sweep_value);
  CHECK(back[1].frames == 9);
}

TEST_CASE("spec JSON round trip and validation") {
  SweepSpec spec = small_awgn_spec();
  spec.fiber.span_length = 123.0;
  spec.mi_max_samples = 5555;
  const std::string text = sweep_spec_to_json(spec);
  const SweepSpec back = parse_sweep_spec(text);
  CHECK(back.channel == spec.channel);
  CHECK(back.constellation == spec.constellation);
  CHECK(back.codec.family == spec.codec.family);
  CHECK(back.codec.alist_path == spec.codec.alist_path);
  CHECK(back.sweep_start == spec.sweep_start);
  CHECK(back.sweep_points == spec.sweep_points);
  CHECK(back.frames_per_point == spec.frames_per_point);
  CHECK(back.master_seed == spec.master_seed);
  CHECK(back.mi_max_samples == 5555);
  CHECK(back.fiber.span_length == 123.0);

  CHECK_THROWS_AS(parse_sweep_spec("{\"chanel\": \"awgn\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep_spec("{\"llr_kind\": \"soft\"}"),
                  std::invalid_argument);
}

}  // TEST_SUITE
