#include "cmsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "sweep_var,pre_ber,mi_norm,gmi_norm,s_star,post_ber,post_ber_ci_lo,"
         "post_ber_ci_hi,frames\n";
  for (const SweepRow& r : rows) {
    out << fmt(r.sweep_value) << ',' << fmt(r.pre_ber) << ',' << fmt(r.mi_norm)
        << ',' << fmt(r.gmi_norm) << ',' << fmt(r.s_star) << ','
        << fmt(r.post_ber) << ',' << fmt(r.post_ber_ci_lo) << ','
        << fmt(r.post_ber_ci_hi) << ',' << r.frames << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("sweep_var,", 0) != 0)
    throw std::runtime_error("bad sweep CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SweepRow r;
    unsigned long long frames = 0;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%llu",
                    &r.sweep_value, &r.pre_ber, &r.mi_norm, &r.gmi_norm,
                    &r.s_star, &r.post_ber, &r.post_ber_ci_lo,
                    &r.post_ber_ci_hi, &frames) != 9)
      throw std::runtime_error("bad sweep CSV row: " + line);
    r.frames = frames;
    rows.push_back(r);
  }
  return rows;
}

void write_threshold_csv(std::ostream& out, const ThresholdReport& report) {
  out << "constellation,rate,metric,required_value\n";
  for (const auto& e : report.entries) {
    if (!e.crossing.crossed) {
      out << e.constellation << ',' << fmt(e.rate) << ",not_crossed,\n";
      continue;
    }
    out << e.constellation << ',' << fmt(e.rate) << ",pre_ber,"
        << fmt(e.crossing.pre_ber) << '\n';
    out << e.constellation << ',' << fmt(e.rate) << ",mi_norm,"
        << fmt(e.crossing.mi_norm) << '\n';
    out << e.constellation << ',' << fmt(e.rate) << ",gmi_norm,"
        << fmt(e.crossing.gmi_norm) << '\n';
  }
}

void write_rate_csv_header(std::ostream& out) {
  out << "metric,constellation,rho_db,value,s_star,n,std_err\n";
}

void write_rate_csv_row(std::ostream& out, const std::string& metric,
                        const std::string& constellation, double rho_db,
                        const RateEstimate& est) {
  out << metric << ',' << constellation << ',' << fmt(rho_db) << ','
      << fmt(est.value) << ',' << fmt(est.s_star) << ',' << est.n_samples
      << ',' << fmt(est.std_err) << '\n';
}

std::vector<ReferencePoint> ingest_reference_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("launch_power_dbm,gmi_norm,post_ber,n_spans,code_rate", 0) !=
          0)
    throw std::runtime_error("bad reference table header");
  std::vector<ReferencePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ReferencePoint p;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%d,%lg", &p.launch_power_dbm,
                    &p.gmi_norm, &p.post_ber, &p.n_spans, &p.code_rate) != 5)
      throw std::runtime_error("bad reference table row: " + line);
    points.push_back(p);
  }
  return points;
}

std::vector<ReferencePoint> ingest_reference_table_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference table: " + path);
  return ingest_reference_table(in);
}

void write_reference_table(std::ostream& out,
                           std::span<const ReferencePoint> points) {
  out << "launch_power_dbm,gmi_norm,post_ber,n_spans,code_rate\n";
  for (const ReferencePoint& p : points) {
    out << fmt(p.launch_power_dbm) << ',' << fmt(p.gmi_norm) << ','
        << fmt(p.post_ber) << ',' << p.n_spans << ',' << fmt(p.code_rate)
        << '\n';
  }
}

namespace {

constexpr double kPlotW = 640.0, kPlotH = 440.0;
constexpr double kMarginL = 70.0, kMarginR = 20.0;
constexpr double kMarginT = 40.0, kMarginB = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg_plot(std::ostream& out, const std::string& title,
                    const std::string& x_label,
                    std::span<const PlotSeries> series, double y_floor) {
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = std::max(s.y[i], y_floor);
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_min > x_max) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = y_floor;
    y_max = 1.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  const double ly_min = std::floor(std::log10(y_min));
  const double ly_max = std::ceil(std::log10(std::max(y_max, y_min * 1.001)));

  const double iw = kPlotW - kMarginL - kMarginR;
  const double ih = kPlotH - kMarginT - kMarginB;
  auto px = [&](double x) {
    return kMarginL + (x - x_min) / (x_max - x_min) * iw;
  };
  auto py = [&](double y) {
    const double ly = std::log10(std::max(y, y_floor));
    return kMarginT + (ly_max - ly) / (ly_max - ly_min) * ih;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotW
      << "\" height=\"" << kPlotH << "\" viewBox=\"0 0 " << kPlotW << ' '
      << kPlotH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kPlotW / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

  // decade grid lines and y tick labels
  for (int d = static_cast<int>(ly_min); d <= static_cast<int>(ly_max); ++d) {
    const double y = py(std::pow(10.0, d));
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << fmt6(y) << "\" x2=\""
        << kPlotW - kMarginR << "\" y2=\"" << fmt6(y)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kMarginL - 6 << "\" y=\"" << fmt6(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e"
        << d << "</text>\n";
  }
  // x ticks
  for (int i = 0; i <= 5; ++i) {
    const double x = x_min + (x_max - x_min) * i / 5.0;
    out << "<line x1=\"" << fmt6(px(x)) << "\" y1=\"" << kPlotH - kMarginB
        << "\" x2=\"" << fmt6(px(x)) << "\" y2=\"" << kPlotH - kMarginB + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt6(px(x)) << "\" y=\"" << kPlotH - kMarginB + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt6(x) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
      << iw << "\" height=\"" << ih
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kPlotW / 2 << "\" y=\"" << kPlotH - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << x_label << "</text>\n";

  int color = 0;
  double legend_y = kMarginT + 14.0;
  for (const PlotSeries& s : series) {
    const char* c = kPalette[color % 8];
    ++color;
    if (s.line && s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << c
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out << ' ';
        out << fmt6(px(s.x[i])) << ',' << fmt6(py(s.y[i]));
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx=\"" << fmt6(px(s.x[i])) << "\" cy=\""
          << fmt6(py(s.y[i])) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    out << "<circle cx=\"" << kPlotW - kMarginR - 150 << "\" cy=\""
        << fmt6(legend_y - 4) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    out << "<text x=\"" << kPlotW - kMarginR - 142 << "\" y=\""
        << fmt6(legend_y) << "\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << s.label << "</text>\n";
    legend_y += 14.0;
  }
  out << "</svg>\n";
}

std::vector<std::string> emit_report(std::span<const SweepRow> rows,
                                     const ThresholdReport& thresholds,
                                     std::span<const ReferencePoint> overlay,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
    return f;
  };

  {
    std::ofstream f = open("sweep.csv");
    write_sweep_csv(f, rows);
  }
  {
    std::ofstream f = open("threshold.csv");
    write_threshold_csv(f, thresholds);
  }

  struct Axis {
    const char* file;
    const char* label;
    double SweepRow::* field;
  };
  const Axis axes[] = {
      {"post_vs_pre_ber.svg", "pre-FEC BER", &SweepRow::pre_ber},
      {"post_vs_mi.svg", "MI / m", &SweepRow::mi_norm},
      {"post_vs_gmi.svg", "GMI / m", &SweepRow::gmi_norm},
  };
  for (const Axis& ax : axes) {
    std::vector<PlotSeries> series;
    PlotSeries s;
    s.label = "simulation";
    for (const SweepRow& r : rows) {
      s.x.push_back(r.*ax.field);
      s.y.push_back(r.post_ber);
    }
    series.push_back(std::move(s));
    if (ax.field == &SweepRow::gmi_norm && !overlay.empty()) {
      PlotSeries o;
      o.label = "reference points";
      o.line = false;
      for (const ReferencePoint& p : overlay) {
        o.x.push_back(p.gmi_norm);
        o.y.push_back(p.post_ber);
      }
      series.push_back(std::move(o));
    }
    std::ofstream f = open(ax.file);
    write_svg_plot(f, std::string("post-FEC BER vs ") + ax.label, ax.label,
                   series);
  }
  return written;
}

}  // namespace cmsim
