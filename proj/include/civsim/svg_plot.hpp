// Copyright 2026 The civsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Static SVG line charts: one panel per metric, a median line per series and
// a min/max band when more than one trial is present. Output is a pure
// function of the input table.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "civsim/csv.hpp"

namespace civsim {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<Spread> y;  // median/min/max per x
};

struct PlotPanel {
  std::string title;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Groups values by x across trials and reduces them to median/min/max.
inline PlotSeries reduce_series(std::string name, const std::map<std::uint64_t, std::vector<double>>& by_x) {
  PlotSeries s;
  s.name = std::move(name);
  for (const auto& [x, vals] : by_x) {
    s.x.push_back(static_cast<double>(x));
    s.y.push_back(spread_of(vals));
  }
  return s;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace detail

inline std::vector<PlotPanel> learning_curve_panels(const std::vector<LearningCurveRow>& rows) {
  std::map<std::uint64_t, std::vector<double>> cs, inv, sd;
  for (const auto& r : rows) {
    cs[r.bin_start].push_back(r.cs_avg);
    inv[r.bin_start].push_back(static_cast<double>(r.invasions));
    sd[r.bin_start].push_back(static_cast<double>(r.successful_defers));
  }
  return {{"collective score (points per step)", {detail::reduce_series("cs_avg", cs)}},
          {"collective invasions", {detail::reduce_series("invasions", inv)}},
          {"successful defers", {detail::reduce_series("successful_defers", sd)}}};
}

inline std::vector<PlotPanel> action_panels(const std::vector<ActionsRow>& rows, int player) {
  PlotPanel panel{"actions of player " + std::to_string(player), {}};
  for (Action a : kAllActions) {
    std::map<std::uint64_t, std::vector<double>> by_x;
    for (const auto& r : rows) {
      if (r.player == player) by_x[r.bin_start].push_back(static_cast<double>(r.counts[action_index(a)]));
    }
    panel.series.push_back(detail::reduce_series(std::string(action_name(a)), by_x));
  }
  return {panel};
}

inline std::string render_svg(const std::vector<PlotPanel>& panels, const std::string& x_label) {
  constexpr double kWidth = 800, kPanelH = 260, kLeft = 70, kRight = 130, kTop = 30, kBottom = 40;
  const double height = kPanelH * static_cast<double>(panels.size());
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(kWidth) +
         "\" height=\"" + detail::fmt2(height) + "\" viewBox=\"0 0 " + detail::fmt2(kWidth) + " " +
         detail::fmt2(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const double y0 = kPanelH * static_cast<double>(p);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kPanelH - kTop - kBottom;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : panel.series) {
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (first) {
          xmin = xmax = s.x[k];
          ymin = s.y[k].min;
          ymax = s.y[k].max;
          first = false;
        }
        xmin = std::min(xmin, s.x[k]);
        xmax = std::max(xmax, s.x[k]);
        ymin = std::min(ymin, s.y[k].min);
        ymax = std::max(ymax, s.y[k].max);
      }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
      ymin -= 1;
      ymax += 1;
    }
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return y0 + kTop + (ymax - y) / (ymax - ymin) * plot_h; };

    out += "<g class=\"panel\">\n";
    out += "<text x=\"" + detail::fmt2(kLeft) + "\" y=\"" + detail::fmt2(y0 + 18) +
           "\" font-size=\"13\">" + detail::escape_xml(panel.title) + "</text>\n";
    out += "<rect x=\"" + detail::fmt2(kLeft) + "\" y=\"" + detail::fmt2(y0 + kTop) + "\" width=\"" +
           detail::fmt2(plot_w) + "\" height=\"" + detail::fmt2(plot_h) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
      const double fx = xmin + (xmax - xmin) * tick / 4.0;
      const double fy = ymin + (ymax - ymin) * tick / 4.0;
      out += "<text x=\"" + detail::fmt2(px(fx)) + "\" y=\"" + detail::fmt2(y0 + kTop + plot_h + 14) +
             "\" text-anchor=\"middle\">" + detail::fmt2(fx) + "</text>\n";
      out += "<text x=\"" + detail::fmt2(kLeft - 6) + "\" y=\"" + detail::fmt2(py(fy) + 4) +
             "\" text-anchor=\"end\">" + detail::fmt2(fy) + "</text>\n";
    }
    out += "<text x=\"" + detail::fmt2(kLeft + plot_w / 2) + "\" y=\"" +
           detail::fmt2(y0 + kPanelH - 6) + "\" text-anchor=\"middle\">" +
           detail::escape_xml(x_label) + "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const PlotSeries& s = panel.series[si];
      const char* color = detail::kPalette[si % std::size(detail::kPalette)];
      const bool has_band = std::any_of(s.y.begin(), s.y.end(),
                                        [](const Spread& v) { return v.min != v.max; });
      if (has_band) {
        std::string pts;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
          pts += detail::fmt2(px(s.x[k])) + "," + detail::fmt2(py(s.y[k].max)) + " ";
        }
        for (std::size_t k = s.x.size(); k-- > 0;) {
          pts += detail::fmt2(px(s.x[k])) + "," + detail::fmt2(py(s.y[k].min)) + " ";
        }
        out += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"" + color +
               "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      }
      std::string pts;
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        pts += detail::fmt2(px(s.x[k])) + "," + detail::fmt2(py(s.y[k].median)) + " ";
      }
      out += "<polyline class=\"median\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
      out += "<text x=\"" + detail::fmt2(kWidth - kRight + 10) + "\" y=\"" +
             detail::fmt2(y0 + kTop + 12 + 14.0 * static_cast<double>(si)) + "\" fill=\"" + color +
             "\">" + detail::escape_xml(s.name) + "</text>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

// Chooses panels from the CSV schema. Throws CsvError for unknown schemas
// and for tables without data rows.
inline std::string plot_csv(const CsvTable& t, int player = 0) {
  if (t.rows.empty()) throw CsvError("CSV has a header but no data rows");
  if (t.column("cs_avg") >= 0) return render_svg(learning_curve_panels(parse_learning_curve(t)), "bin_start");
  if (t.column("defer") >= 0) return render_svg(action_panels(parse_actions(t), player), "bin_start");
  throw CsvError("unrecognized CSV schema");
}

}  // namespace civsim
