#include "nvrr/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

namespace nvrr {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 74.0;
constexpr double kRight = 614.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 430.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string x_col;
  std::string y_col;
  std::string series_col;  // optional
  std::string x_label;
  std::string y_label;
  std::string title;
  bool log_x = false;
};

PlotSpec spec_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::fidelity_curve:
      return {"n", "f", "protocol", "readouts N", "readout fidelity F", "Fidelity vs readouts", true};
    case PlotKind::signal:
      return {"n", "signal", "protocol", "readouts N", "cumulative signal C0-C1",
              "Cumulative signal", true};
    case PlotKind::nr_sweep:
      return {"n_r", "improvement", "", "correction period N_r", "fidelity improvement",
              "Improvement vs correction period", false};
    case PlotKind::field_sweep:
      return {"b0_mt", "improvement", "n_r", "field B0 (mT)", "fidelity improvement",
              "Improvement vs magnetic field", false};
  }
  throw invalid_argument("unknown plot kind");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_number(const std::string& s, const char* col) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || (end && *end != '\0'))
    throw schema_mismatch(std::string("plot: non-numeric value in column ") + col + ": '" + s + "'");
  return v;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double range = hi - lo;
  if (range <= 0.0) return {lo};
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * range; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * range ? 0.0 : t);
  return ticks;
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "fidelity_curve") return PlotKind::fidelity_curve;
  if (name == "signal") return PlotKind::signal;
  if (name == "nr_sweep") return PlotKind::nr_sweep;
  if (name == "field_sweep") return PlotKind::field_sweep;
  throw invalid_argument("plot: unknown kind '" + name +
                         "' (expected fidelity_curve, signal, nr_sweep or field_sweep)");
}

std::string render_plot(PlotKind kind, const CsvTable& table) {
  const PlotSpec spec = spec_for(kind);
  const int xc = table.column(spec.x_col);
  const int yc = table.column(spec.y_col);
  if (xc < 0 || yc < 0)
    throw schema_mismatch("plot: csv must have columns '" + spec.x_col + "' and '" + spec.y_col + "'");
  if (table.rows.empty()) throw schema_mismatch("plot: csv has no data rows");
  const int sc = spec.series_col.empty() ? -1 : table.column(spec.series_col);

  std::vector<Series> series;
  std::map<std::string, size_t> index;
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) <= std::max(xc, yc))
      throw schema_mismatch("plot: short csv row");
    const std::string key = sc >= 0 && sc < static_cast<int>(row.size()) ? row[sc] : "";
    auto [it, inserted] = index.emplace(key, series.size());
    if (inserted) series.push_back(Series{key, {}, {}});
    Series& s = series[it->second];
    const double x = parse_number(row[xc], spec.x_col.c_str());
    if (spec.log_x && x <= 0.0) throw schema_mismatch("plot: log axis requires positive x");
    s.x.push_back(spec.log_x ? std::log10(x) : x);
    s.y.push_back(parse_number(row[yc], spec.y_col.c_str()));
  }

  double x_lo = series[0].x[0], x_hi = x_lo, y_lo = series[0].y[0], y_hi = y_lo;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  const double y_pad = (y_hi == y_lo) ? std::max(0.5, std::abs(y_hi) * 0.1) : 0.06 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + spec.title + "</text>\n";

  // Ticks and grid.
  std::string grid, tick_labels;
  auto add_x_tick = [&](double value, const std::string& label) {
    const double x = px(value);
    grid += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
            fmt(kBottom) + "\" stroke=\"#dddddd\"/>\n";
    tick_labels += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kBottom + 18.0) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + label +
                   "</text>\n";
  };
  if (spec.log_x) {
    for (int d = static_cast<int>(std::floor(x_lo)); d <= static_cast<int>(std::ceil(x_hi)); ++d) {
      if (d < x_lo - 1e-9 || d > x_hi + 1e-9) continue;
      add_x_tick(d, fmt_tick(std::pow(10.0, d)));
    }
  } else {
    for (double t : linear_ticks(x_lo, x_hi)) add_x_tick(t, fmt_tick(t));
  }
  for (double t : linear_ticks(y_lo, y_hi)) {
    const double y = py(t);
    grid += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kRight) +
            "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\"/>\n";
    tick_labels += "<text x=\"" + fmt(kLeft - 8.0) + "\" y=\"" + fmt(y + 4.0) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                   fmt_tick(t) + "</text>\n";
  }
  svg += grid;
  svg += tick_labels;

  // Frame and axis titles.
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kRight - kLeft) +
         "\" height=\"" + fmt(kBottom - kTop) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + fmt((kLeft + kRight) / 2.0) + "\" y=\"" + fmt(kHeight - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + spec.x_label +
         "</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt((kTop + kBottom) / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 "
         "20 " + fmt((kTop + kBottom) / 2.0) + ")\">" + spec.y_label + "</text>\n";

  // Data.
  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    for (size_t i = 0; i < s.x.size(); ++i)
      points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    if (s.x.size() <= 64) {
      for (size_t i = 0; i < s.x.size(); ++i)
        svg += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) +
               "\" r=\"2.5\" fill=\"" + std::string(color) + "\"/>\n";
    }
  }

  // Legend for named series.
  if (series.size() > 1 || (series.size() == 1 && !series[0].name.empty())) {
    double y = kTop + 14.0;
    for (size_t si = 0; si < series.size(); ++si) {
      const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
      const std::string label = series[si].name.empty() ? spec.y_col : series[si].name;
      svg += "<line x1=\"" + fmt(kRight - 120.0) + "\" y1=\"" + fmt(y - 4.0) + "\" x2=\"" +
             fmt(kRight - 96.0) + "\" y2=\"" + fmt(y - 4.0) + "\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + fmt(kRight - 90.0) + "\" y=\"" + fmt(y) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + label + "</text>\n";
      y += 16.0;
    }
  }

  svg += "</svg>\n";
  return svg;
}

void render_plot_file(PlotKind kind, const std::string& csv_path, const std::string& svg_path) {
  const CsvTable table = parse_csv(read_text_file(csv_path));
  if (table.header.empty()) throw schema_mismatch("plot: empty csv");
  write_text_file(svg_path, render_plot(kind, table));
}

}  // namespace nvrr
