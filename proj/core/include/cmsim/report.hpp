#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cmsim/rates.hpp"
#include "cmsim/sweep.hpp"

namespace cmsim {

// sweep CSV schema:
//   sweep_var,pre_ber,mi_norm,gmi_norm,s_star,post_ber,post_ber_ci_lo,
//   post_ber_ci_hi,frames
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// threshold CSV schema: constellation,rate,metric,required_value
void write_threshold_csv(std::ostream& out, const ThresholdReport& report);

// RateEstimate CSV schema: metric,constellation,rho_db,value,s_star,n,std_err
void write_rate_csv_header(std::ostream& out);
void write_rate_csv_row(std::ostream& out, const std::string& metric,
                        const std::string& constellation, double rho_db,
                        const RateEstimate& est);

// One row of the reference measurement table shipped with the project.
struct ReferencePoint {
  double launch_power_dbm = 0.0;
  double gmi_norm = 0.0;
  double post_ber = 0.0;
  int n_spans = 0;
  double code_rate = 0.0;
};

// CSV schema: launch_power_dbm,gmi_norm,post_ber,n_spans,code_rate
std::vector<ReferencePoint> ingest_reference_table(std::istream& in);
std::vector<ReferencePoint> ingest_reference_table_file(
    const std::string& path);
void write_reference_table(std::ostream& out,
                           std::span<const ReferencePoint> points);

// Static SVG scatter/line plot of post-FEC BER (log y) against a predictor.
// Output is deterministic: identical inputs give identical bytes.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;
};
void write_svg_plot(std::ostream& out, const std::string& title,
                    const std::string& x_label,
                    std::span<const PlotSeries> series, double y_floor = 1e-6);

// Writes sweep.csv, threshold.csv and the three predictor plots into out_dir;
// reference points, when present, are overlaid on the GMI plot. Returns the
// paths written.
std::vector<std::string> emit_report(std::span<const SweepRow> rows,
                                     const ThresholdReport& thresholds,
                                     std::span<const ReferencePoint> overlay,
                                     const std::string& out_dir);

}  // namespace cmsim
