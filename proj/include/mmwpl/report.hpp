// SPDX-License-Identifier: Apache-2.0
#pragma once

// Report artifacts: per-season path-loss curves, metric tables and charts,
// rendered as standalone SVG with CSV sidecars.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mmwpl/atmosphere.hpp"
#include "mmwpl/dataset.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/regression/benchmark.hpp"
#include "mmwpl/regression/metrics.hpp"

namespace mmwpl {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> spread;  // +/- 1 sigma about y
};

inline std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string frequency_label(double ghz) {
  std::ostringstream os;
  os << ghz << " GHz";
  return os.str();
}

/// Mean path loss and spread vs T-R separation for one season, one series
/// per frequency.
///
/// In per-drop mode (default) every drop contributes once: rows sharing
/// season, frequency, distance, path loss and RMS delay spread are the
/// records of one drop. In per-row mode every record contributes.
inline std::vector<PlotSeries> path_loss_series(const TabularDataset& data, Season season, bool per_row = false) {
  const auto need = [&](std::string_view c) {
    auto i = data.column_index(c);
    if (!i) throw SchemaError("missing column '" + std::string(c) + "'");
    return *i;
  };
  const auto c_season = need(columns::kSeason), c_freq = need(columns::kFrequency),
             c_dist = need(columns::kSeparation), c_pl = need(columns::kPathLoss),
             c_rms = need(columns::kRmsDelaySpread);
  auto num = [](const Cell& c) {
    if (auto* d = std::get_if<double>(&c)) return *d;
    throw SchemaError("expected numeric cell");
  };

  using DropKey = std::tuple<double, double, double, double>;
  std::set<DropKey> seen;
  std::map<double, std::map<double, std::vector<double>>> values;  // freq -> distance -> samples
  for (const auto& row : data.rows()) {
    const auto* label = std::get_if<std::string>(&row[c_season]);
    if (!label || *label != season_name(season)) continue;
    const double f = num(row[c_freq]), d = num(row[c_dist]), pl = num(row[c_pl]);
    if (!per_row && !seen.insert({f, d, pl, num(row[c_rms])}).second) continue;
    values[f][d].push_back(pl);
  }

  std::vector<PlotSeries> out;
  for (const auto& [f, by_dist] : values) {
    PlotSeries s;
    s.label = frequency_label(f);
    for (const auto& [d, v] : by_dist) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      s.x.push_back(d);
      s.y.push_back(mean);
      s.spread.push_back(std::sqrt(var / static_cast<double>(v.size())));
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Seasons present in a dataset, in canonical order.
inline std::vector<Season> seasons_in(const TabularDataset& data) {
  auto c = data.column_index(columns::kSeason);
  if (!c) throw SchemaError("missing column 'Season'");
  std::set<Season> found;
  for (const auto& row : data.rows())
    if (auto* s = std::get_if<std::string>(&row[*c]))
      if (auto season = parse_season(*s)) found.insert(*season);
  return {found.begin(), found.end()};
}

// ------------------------------------------------------------- metrics ----

struct MetricsRow {
  std::string model;
  MetricsReport metrics;
};

inline std::vector<MetricsRow> metrics_rows(const std::vector<BenchmarkEntry>& entries) {
  std::vector<MetricsRow> rows;
  for (const auto& e : entries)
    if (e.metrics) rows.push_back({std::string(kind_label(e.kind)), *e.metrics});
  return rows;
}

/// Aligned text table: Models, MAE, MSE, RMSE, R2 with three decimals.
inline std::string metrics_table_text(const std::vector<MetricsRow>& rows) {
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.model.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "Models" << std::right;
  for (const char* h : {"MAE", "MSE", "RMSE", "R2"}) os << "  " << std::setw(8) << h;
  os << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(w)) << r.model << std::right;
    os << "  " << std::setw(8) << format_fixed(r.metrics.mae, 3);
    os << "  " << std::setw(8) << format_fixed(r.metrics.mse, 3);
    os << "  " << std::setw(8) << format_fixed(r.metrics.rmse, 3);
    os << "  " << std::setw(8) << (r.metrics.r2 ? format_fixed(*r.metrics.r2, 3) : std::string("n/a"));
    os << '\n';
  }
  return os.str();
}

/// CSV with full-precision values so identities can be re-checked downstream.
inline void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  TabularDataset t({"Models", "MAE", "MSE", "RMSE", "R2"});
  for (const auto& r : rows)
    t.add_row({r.model, r.metrics.mae, r.metrics.mse, r.metrics.rmse,
               r.metrics.r2 ? Cell(*r.metrics.r2) : Cell(std::string("n/a"))});
  write_csv(t, out);
}

inline std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  const TabularDataset t = read_csv(path);
  const std::vector<std::string> expected{"Models", "MAE", "MSE", "RMSE", "R2"};
  if (t.columns() != expected) throw SchemaError("metrics file '" + path + "' must have columns Models,MAE,MSE,RMSE,R2");
  std::vector<MetricsRow> rows;
  for (const auto& r : t.rows()) {
    MetricsRow m;
    auto* name = std::get_if<std::string>(&r[0]);
    if (!name) throw SchemaError("metrics file: model name must be text");
    m.model = *name;
    auto num = [&](std::size_t i) {
      auto* d = std::get_if<double>(&r[i]);
      if (!d) throw SchemaError("metrics file: non-numeric " + expected[i] + " for " + m.model);
      return *d;
    };
    m.metrics.mae = num(1);
    m.metrics.mse = num(2);
    m.metrics.rmse = num(3);
    if (std::holds_alternative<double>(r[4])) m.metrics.r2 = num(4);
    rows.push_back(std::move(m));
  }
  return rows;
}

/// Prior-study comparison table with this run's best model as the last row.
inline std::string literature_table_text(const std::optional<MetricsRow>& best) {
  auto cell = [](const std::optional<double>& v, int digits) { return v ? format_fixed(*v, digits) : std::string("-"); };
  std::ostringstream os;
  os << std::left << std::setw(34) << "References" << std::right;
  for (const char* h : {"MAE", "MSE", "RMSE", "R2"}) os << "  " << std::setw(8) << h;
  os << '\n';
  for (const auto& r : literature_results()) {
    os << std::left << std::setw(34) << r.citation << std::right << "  " << std::setw(8) << cell(r.mae, 2) << "  "
       << std::setw(8) << cell(r.mse, 2) << "  " << std::setw(8) << cell(r.rmse, 2) << "  " << std::setw(8)
       << cell(r.r2, 2) << '\n';
  }
  if (best) {
    os << std::left << std::setw(34) << ("This run (" + best->model + ")") << std::right << "  " << std::setw(8)
       << format_fixed(best->metrics.mae, 3) << "  " << std::setw(8) << format_fixed(best->metrics.mse, 3) << "  "
       << std::setw(8) << format_fixed(best->metrics.rmse, 3) << "  " << std::setw(8) << cell(best->metrics.r2, 3)
       << '\n';
  }
  return os.str();
}

// ----------------------------------------------------------------- SVG ----

namespace svg {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline constexpr std::array<std::string_view, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

/// "Nice" tick step covering [lo, hi] with about `count` ticks.
inline double tick_step(double lo, double hi, int count) {
  const double raw = (hi - lo) / std::max(1, count);
  if (!(raw > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

struct Frame {
  double width = 800, height = 500;
  double left = 70, right = 170, top = 50, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline void open(std::ostringstream& os, const Frame& f, std::string_view title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
     << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<title>" << escape(title) << "</title>\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << f.width << "\" height=\"" << f.height << "\" fill=\"white\"/>\n"
     << "<text x=\"" << num(f.width / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
     << "</text>\n";
}

inline void axes(std::ostringstream& os, const Frame& f, std::string_view xlabel, std::string_view ylabel,
                 bool x_ticks = true) {
  const double bx = f.left, by = f.height - f.bottom, ex = f.width - f.right, ey = f.top;
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
     << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(ex) << "\" y2=\"" << num(by) << "\"/>\n"
     << "<line x1=\"" << num(bx) << "\" y1=\"" << num(by) << "\" x2=\"" << num(bx) << "\" y2=\"" << num(ey) << "\"/>\n"
     << "</g>\n<g class=\"ticks\">\n";
  const double ys = tick_step(f.y0, f.y1, 6);
  for (double y = std::ceil(f.y0 / ys) * ys; y <= f.y1 + 1e-9 * ys; y += ys) {
    os << "<line x1=\"" << num(bx - 4) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(bx) << "\" y2=\""
       << num(f.py(y)) << "\" stroke=\"black\"/>"
       << "<text x=\"" << num(bx - 7) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
       << "</text>\n";
  }
  if (x_ticks) {
    const double xs = tick_step(f.x0, f.x1, 8);
    for (double x = std::ceil(f.x0 / xs) * xs; x <= f.x1 + 1e-9 * xs; x += xs) {
      os << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(by) << "\" x2=\"" << num(f.px(x)) << "\" y2=\""
         << num(by + 4) << "\" stroke=\"black\"/>"
         << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(by + 18) << "\" text-anchor=\"middle\">" << num(x)
         << "</text>\n";
    }
  }
  os << "</g>\n"
     << "<text x=\"" << num((bx + ex) / 2) << "\" y=\"" << num(f.height - 15) << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n"
     << "<text x=\"18\" y=\"" << num((by + ey) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num((by + ey) / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace svg

/// Line chart with one polyline and +/-1 sigma band per series. Each series
/// is a <g class="series" data-label="..."> group.
inline std::string render_line_chart(const std::vector<PlotSeries>& series, std::string_view title,
                                     std::string_view xlabel, std::string_view ylabel) {
  svg::Frame f;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      const double sp = i < s.spread.size() ? s.spread[i] : 0.0;
      ymin = std::min(ymin, s.y[i] - sp);
      ymax = std::max(ymax, s.y[i] + sp);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 1, xmax += 1;
  if (ymax == ymin) ymin -= 1, ymax += 1;
  const double pad = 0.05 * (ymax - ymin);
  f.x0 = xmin;
  f.x1 = xmax;
  f.y0 = ymin - pad;
  f.y1 = ymax + pad;

  std::ostringstream os;
  svg::open(os, f, title);
  svg::axes(os, f, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto color = svg::kPalette[k % svg::kPalette.size()];
    os << "<g class=\"series\" data-label=\"" << svg::escape(s.label) << "\">\n";
    if (!s.spread.empty()) {
      os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << svg::num(f.px(s.x[i])) << ',' << svg::num(f.py(s.y[i] + s.spread[i])) << ' ';
      for (std::size_t i = s.x.size(); i-- > 0;) os << svg::num(f.px(s.x[i])) << ',' << svg::num(f.py(s.y[i] - s.spread[i])) << ' ';
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << svg::num(f.px(s.x[i])) << ',' << svg::num(f.py(s.y[i])) << ' ';
    os << "\"/>\n";
    const double ly = f.top + 10 + 20 * static_cast<double>(k);
    const double lx = f.width - f.right + 15;
    os << "<line x1=\"" << svg::num(lx) << "\" y1=\"" << svg::num(ly) << "\" x2=\"" << svg::num(lx + 25) << "\" y2=\""
       << svg::num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << svg::num(lx + 30) << "\" y=\"" << svg::num(ly + 4) << "\">" << svg::escape(s.label)
       << "</text>\n</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

struct Bar {
  std::string label;
  double value = 0.0;
  std::string group;  // used for coloring
};

/// Vertical bar chart, one <g class="bar" data-label=... data-value=...> per bar.
inline std::string render_bar_chart(const std::vector<Bar>& bars, std::string_view title, std::string_view ylabel) {
  svg::Frame f;
  f.right = 30;
  f.bottom = 120;
  double ymax = 0.0, ymin = 0.0;
  for (const auto& b : bars) {
    ymax = std::max(ymax, b.value);
    ymin = std::min(ymin, b.value);
  }
  if (ymax == ymin) ymax = ymin + 1.0;
  f.x0 = 0;
  f.x1 = static_cast<double>(std::max<std::size_t>(bars.size(), 1));
  f.y0 = ymin;
  f.y1 = ymax * 1.1 - ymin * 0.1;

  std::vector<std::string> groups;
  for (const auto& b : bars)
    if (std::find(groups.begin(), groups.end(), b.group) == groups.end()) groups.push_back(b.group);

  std::ostringstream os;
  svg::open(os, f, title);
  svg::axes(os, f, "", ylabel, false);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const auto g = static_cast<std::size_t>(std::find(groups.begin(), groups.end(), b.group) - groups.begin());
    const double x = f.px(static_cast<double>(i) + 0.15), w = f.px(static_cast<double>(i) + 0.85) - x;
    const double top = f.py(std::max(b.value, 0.0)), base = f.py(std::min(b.value, 0.0));
    const double cx = x + w / 2, label_y = f.height - f.bottom + 12;
    os << "<g class=\"bar\" data-label=\"" << svg::escape(b.label) << "\" data-value=\"" << b.value << "\">"
       << "<rect x=\"" << svg::num(x) << "\" y=\"" << svg::num(top) << "\" width=\"" << svg::num(w) << "\" height=\""
       << svg::num(base - top) << "\" fill=\"" << svg::kPalette[g % svg::kPalette.size()] << "\"/>"
       << "<text x=\"" << svg::num(cx) << "\" y=\"" << svg::num(top - 4) << "\" text-anchor=\"middle\">"
       << format_fixed(b.value, 3) << "</text>"
       << "<text x=\"" << svg::num(cx) << "\" y=\"" << svg::num(label_y) << "\" text-anchor=\"end\" transform=\"rotate(-35 "
       << svg::num(cx) << ' ' << svg::num(label_y) << ")\">" << svg::escape(b.label) << "</text></g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline std::string series_csv(const std::vector<PlotSeries>& series) {
  TabularDataset t({"Series", "T-R Separation Distance (m)", "Mean Path Loss (dB)", "Std Path Loss (dB)"});
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      t.add_row({s.label, s.x[i], s.y[i], i < s.spread.size() ? s.spread[i] : 0.0});
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

inline std::string bars_csv(const std::vector<Bar>& bars, std::string_view value_name) {
  TabularDataset t({"Label", std::string(value_name), "Group"});
  for (const auto& b : bars) t.add_row({b.label, b.value, b.group});
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

/// Bars for the RMSE comparison: every prior study reporting RMSE, then the
/// best model of this run.
inline std::vector<Bar> rmse_comparison_bars(const MetricsRow& best) {
  std::vector<Bar> bars;
  for (const auto& r : literature_results())
    if (r.rmse) bars.push_back({std::string(r.citation), *r.rmse, "literature"});
  bars.push_back({"This run: " + best.model, best.metrics.rmse, "this run"});
  return bars;
}

}  // namespace mmwpl
