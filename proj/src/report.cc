// Copyright 2026 The qmodel Authors
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

#include "qmodel/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qmodel/io.h"

namespace qmodel {
namespace {

constexpr const char* kPalette[] = {"#1b9e77", "#1f5fbf", "#d62728", "#222222", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double pixel_lo = 0, pixel_hi = 1;

  double map(double v) const {
    double a = log ? std::log10(v) : v;
    double l = log ? std::log10(lo) : lo;
    double h = log ? std::log10(hi) : hi;
    if (h == l) h = l + 1;
    return pixel_lo + (a - l) / (h - l) * (pixel_hi - pixel_lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) t.push_back(v);
      }
    } else {
      for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5.0);
    }
    return t;
  }
};

Axis value_axis(const std::vector<Series>& series, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v) || (log && v <= 0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = log ? 1e-3 : 0, hi = 1;
  Axis a;
  a.log = log;
  if (log) {
    a.lo = std::pow(10.0, std::floor(std::log10(lo)));
    a.hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (a.hi <= a.lo) a.hi = a.lo * 10;
  } else {
    a.lo = std::min(0.0, lo);
    a.hi = hi > a.lo ? hi * 1.05 : a.lo + 1;
  }
  return a;
}

std::string open_svg(const ChartOptions& o) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(o.title) + "</text>\n";
  s += "<text x=\"" + num(kLeft + (kWidth - kLeft - kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\">" + escape(o.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(kTop + (kHeight - kTop - kBottom) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(o.y_label) + "</text>\n";
  return s;
}

void draw_y_axis(std::string& s, const Axis& y) {
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  for (double t : y.ticks()) {
    const double py = y.map(t);
    s += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
         num(py) + "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + num(t) + "</text>\n";
  }
}

void draw_legend(std::string& s, const std::vector<Series>& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    s += "<rect x=\"" + num(kWidth - kRight + 12) + "\" y=\"" + num(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
         kPalette[i % 7] + "\"/>\n";
    s += "<text x=\"" + num(kWidth - kRight + 28) + "\" y=\"" + num(y) + "\">" + escape(series[i].name) + "</text>\n";
  }
}

}  // namespace

std::string confusion_csv(const ConfusionMatrix& confusion) {
  std::string out = "actual_n";
  for (int v : confusion.class_values) out += ",predicted_" + std::to_string(v);
  out += '\n';
  for (std::size_t r = 0; r < confusion.class_values.size(); ++r) {
    out += std::to_string(confusion.class_values[r]);
    for (long c : confusion.counts[r]) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::string regression_summary_csv(const RegressionReport& report) {
  std::string out = "family,mre,restricted_mre,mae,entries,zero_actual_excluded,restricted_excluded\n";
  auto row = [&](const char* name, const ParameterErrors& e) {
    out += name;
    out += ',' + format_double(e.mre) + ',' + format_double(e.restricted_mre) + ',' + format_double(e.mae) + ',' +
           std::to_string(e.entries) + ',' + std::to_string(e.zero_actual_excluded) + ',' +
           std::to_string(e.restricted_excluded) + '\n';
  };
  row("h", report.h);
  row("gamma", report.gamma);
  return out;
}

std::string regression_bins_csv(const RegressionReport& report) {
  std::string out = "family,bin_lo,bin_hi,count,mre,mae\n";
  auto rows = [&](const char* name, const ParameterErrors& e) {
    for (const ErrorBin& b : e.bins) {
      out += name;
      out += ',' + format_double(b.lo) + ',' + format_double(b.hi) + ',' + std::to_string(b.count) + ',' +
             format_double(b.mre) + ',' + format_double(b.mae) + '\n';
    }
  };
  rows("h", report.h);
  rows("gamma", report.gamma);
  return out;
}

std::string trajectory_csv(const std::vector<double>& times, const Eigen::MatrixXd& populations) {
  const Eigen::Index d = populations.cols();
  std::string out = "t_us";
  for (Eigen::Index k = 0; k + 1 < d; ++k) out += ",p_" + std::to_string(k);
  out += ",p_out\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += format_double(times[i]);
    for (Eigen::Index k = 0; k < d; ++k) out += ',' + format_double(populations(static_cast<Eigen::Index>(i), k));
    out += '\n';
  }
  return out;
}

std::string couplings_csv(const OutputCouplingSet& set) {
  std::string out = "q";
  for (int n = 0; n < set.n_states(); ++n) out += ",kappa_" + std::to_string(n);
  out += '\n';
  for (int q = 0; q < set.q_count(); ++q) {
    out += std::to_string(q);
    for (double k : set.row(q)) out += ',' + format_double(k);
    out += '\n';
  }
  return out;
}

std::string svg_bar_chart(const std::vector<std::string>& categories, const std::vector<Series>& series,
                          const ChartOptions& options) {
  std::string s = open_svg(options);
  Axis y = value_axis(series, options.log_y);
  y.pixel_lo = kHeight - kBottom;
  y.pixel_hi = kTop;
  draw_y_axis(s, y);
  const double plot_w = kWidth - kLeft - kRight;
  const double group_w = categories.empty() ? plot_w : plot_w / static_cast<double>(categories.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, series.size()));
  const double base = options.log_y ? y.pixel_lo : y.map(std::max(0.0, y.lo));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c);
    s += "<text x=\"" + num(gx + group_w / 2) + "\" y=\"" + num(kHeight - kBottom + 16) +
         "\" text-anchor=\"middle\">" + escape(categories[c]) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (c >= series[k].values.size()) continue;
      const double v = series[k].values[c];
      if (!std::isfinite(v) || (options.log_y && v <= 0)) continue;
      const double top = y.map(v);
      s += "<rect x=\"" + num(gx + group_w * 0.1 + bar_w * static_cast<double>(k)) + "\" y=\"" +
           num(std::min(top, base)) + "\" width=\"" + num(bar_w) + "\" height=\"" + num(std::abs(base - top)) +
           "\" fill=\"" + kPalette[k % 7] + "\"><title>" + escape(series[k].name) + ": " + num(v) +
           "</title></rect>\n";
    }
  }
  draw_legend(s, series);
  s += "</svg>\n";
  return s;
}

std::string svg_line_chart(const std::vector<double>& x, const std::vector<Series>& series,
                           const ChartOptions& options) {
  std::string s = open_svg(options);
  Axis y = value_axis(series, options.log_y);
  y.pixel_lo = kHeight - kBottom;
  y.pixel_hi = kTop;
  Axis xa = value_axis({Series{"x", x}}, options.log_x);
  if (!options.log_x && !x.empty()) {
    xa.lo = *std::min_element(x.begin(), x.end());
    xa.hi = *std::max_element(x.begin(), x.end());
  }
  xa.pixel_lo = kLeft;
  xa.pixel_hi = kWidth - kRight;
  draw_y_axis(s, y);
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
       "\" y2=\"" + num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  for (double t : xa.ticks()) {
    s += "<text x=\"" + num(xa.map(t)) + "\" y=\"" + num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
         num(t) + "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::string pts;
    for (std::size_t i = 0; i < x.size() && i < series[k].values.size(); ++i) {
      const double v = series[k].values[i];
      if (!std::isfinite(v) || (options.log_y && v <= 0) || (options.log_x && x[i] <= 0)) continue;
      const double px = xa.map(x[i]), py = y.map(v);
      pts += num(px) + "," + num(py) + " ";
      s += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3\" fill=\"" + kPalette[k % 7] + "\"/>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[k % 7]) + "\" stroke-width=\"1.5\" points=\"" +
         pts + "\"/>\n";
  }
  draw_legend(s, series);
  s += "</svg>\n";
  return s;
}

std::string svg_confusion(const ConfusionMatrix& confusion, const std::string& title) {
  ChartOptions o{title, "predicted N", "actual N", false, false};
  std::string s = open_svg(o);
  const std::size_t c = confusion.class_values.size();
  if (c == 0) return s + "</svg>\n";
  long max_count = 1;
  for (const auto& row : confusion.counts)
    for (long v : row) max_count = std::max(max_count, v);
  const double cell = std::min((kWidth - kLeft - kRight), (kHeight - kTop - kBottom)) / static_cast<double>(c);
  for (std::size_t r = 0; r < c; ++r) {
    const double y = kTop + cell * static_cast<double>(r);
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + cell / 2 + 4) + "\" text-anchor=\"end\">" +
         std::to_string(confusion.class_values[r]) + "</text>\n";
    for (std::size_t p = 0; p < c; ++p) {
      const double x = kLeft + cell * static_cast<double>(p);
      const long v = confusion.counts[r][p];
      const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(v) / static_cast<double>(max_count));
      char fill[16];
      std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
           "\" fill=\"" + fill + "\" stroke=\"white\"/>\n";
      s += "<text x=\"" + num(x + cell / 2) + "\" y=\"" + num(y + cell / 2 + 4) + "\" text-anchor=\"middle\">" +
           std::to_string(v) + "</text>\n";
    }
  }
  for (std::size_t p = 0; p < c; ++p) {
    s += "<text x=\"" + num(kLeft + cell * (static_cast<double>(p) + 0.5)) + "\" y=\"" +
         num(kTop + cell * static_cast<double>(c) + 16) + "\" text-anchor=\"middle\">" +
         std::to_string(confusion.class_values[p]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace qmodel
