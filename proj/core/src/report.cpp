#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "isaccoop/harness.hpp"

namespace isaccoop {

namespace {

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string csv_string(const std::vector<ResultRecord>& records) {
  // Column set: union of sweep keys in first-appearance order.
  std::vector<std::string> keys;
  for (const auto& rec : records) {
    for (const auto& [k, _] : rec.coordinates) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }

  std::string out = "experiment";
  for (const auto& k : keys) out += "," + k;
  out += ",metric,value,stderr,trials\n";

  for (const auto& rec : records) {
    out += rec.experiment;
    for (const auto& k : keys) {
      out += ",";
      for (const auto& [ck, cv] : rec.coordinates) {
        if (ck == k) {
          out += cv;
          break;
        }
      }
    }
    out += "," + rec.metric;
    out += "," + format_double(rec.value);
    out += "," + format_double(rec.standard_error);
    out += "," + std::to_string(rec.trials);
    out += "\n";
  }
  return out;
}

void emit_csv(const std::vector<ResultRecord>& records, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << csv_string(records);
  if (!f) throw IoError("short write to '" + path + "'");
}

void emit_svg(const std::vector<ResultRecord>& records, const std::string& path,
              const SvgAxes& axes) {
  struct PointXY {
    double x, y;
  };
  std::map<std::string, std::vector<PointXY>> series;
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  std::map<std::string, double> x_categories;

  for (const auto& rec : records) {
    if (rec.metric != axes.metric || rec.trials == 0 || std::isnan(rec.value)) continue;
    std::string x_str;
    std::string label;
    for (const auto& [k, v] : rec.coordinates) {
      if (k == axes.x_key) {
        x_str = v;
      } else {
        if (!label.empty()) label += " ";
        label += k + "=" + v;
      }
    }
    if (x_str.empty()) continue;
    double x;
    const auto res = std::from_chars(x_str.data(), x_str.data() + x_str.size(), x);
    if (res.ec != std::errc()) {
      auto it = x_categories.find(x_str);
      if (it == x_categories.end()) {
        it = x_categories.emplace(x_str, static_cast<double>(x_categories.size())).first;
      }
      x = it->second;
    }
    double y = rec.value;
    if (axes.log_y) {
      if (y <= 0.0) continue;
      y = std::log10(y);
    }
    series[label.empty() ? axes.metric : label].push_back({x, y});
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (series.empty()) throw IoError("no records to plot for metric '" + axes.metric + "'");
  if (x_max - x_min < 1e-12) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const double width = 640, height = 420;
  const double ml = 70, mr = 20, mt = 36, mb = 46;
  auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  auto sy = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(width, 0) +
         "\" height=\"" + format_fixed(height, 0) + "\" viewBox=\"0 0 " +
         format_fixed(width, 0) + " " + format_fixed(height, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_fixed(width / 2, 1) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         (axes.title.empty() ? axes.metric : axes.title) + "</text>\n";

  // Axes and ticks.
  svg += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(height - mb, 1) +
         "\" x2=\"" + format_fixed(width - mr, 1) + "\" y2=\"" + format_fixed(height - mb, 1) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(mt, 1) + "\" x2=\"" +
         format_fixed(ml, 1) + "\" y2=\"" + format_fixed(height - mb, 1) +
         "\" stroke=\"black\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / n_ticks;
    const double fy = y_min + (y_max - y_min) * i / n_ticks;
    svg += "<text x=\"" + format_fixed(sx(fx), 1) + "\" y=\"" + format_fixed(height - mb + 16, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           format_fixed(fx, 2) + "</text>\n";
    const std::string ylabel =
        axes.log_y ? ("1e" + format_fixed(fy, 1)) : format_fixed(fy, 3);
    svg += "<text x=\"" + format_fixed(ml - 6, 1) + "\" y=\"" + format_fixed(sy(fy) + 3, 1) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + ylabel +
           "</text>\n";
  }
  svg += "<text x=\"" + format_fixed((ml + width - mr) / 2, 1) + "\" y=\"" +
         format_fixed(height - 10, 1) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + axes.x_key +
         "</text>\n";

  int color = 0;
  double legend_y = mt + 8;
  for (const auto& [label, pts] : series) {
    std::vector<PointXY> sorted = pts;
    std::sort(sorted.begin(), sorted.end(),
              [](const PointXY& a, const PointXY& b) { return a.x < b.x; });
    std::string poly;
    for (const auto& p : sorted) {
      if (!poly.empty()) poly += " ";
      poly += format_fixed(sx(p.x), 2) + "," + format_fixed(sy(p.y), 2);
    }
    const char* c = kColors[color % 8];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(c) +
           "\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
    for (const auto& p : sorted) {
      svg += "<circle cx=\"" + format_fixed(sx(p.x), 2) + "\" cy=\"" + format_fixed(sy(p.y), 2) +
             "\" r=\"2.5\" fill=\"" + std::string(c) + "\"/>\n";
    }
    svg += "<rect x=\"" + format_fixed(width - mr - 180, 1) + "\" y=\"" +
           format_fixed(legend_y - 8, 1) + "\" width=\"10\" height=\"10\" fill=\"" +
           std::string(c) + "\"/>\n";
    svg += "<text x=\"" + format_fixed(width - mr - 166, 1) + "\" y=\"" +
           format_fixed(legend_y + 1, 1) + "\" font-family=\"sans-serif\" font-size=\"10\">" +
           label + "</text>\n";
    legend_y += 14;
    ++color;
  }
  svg += "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << svg;
  if (!f) throw IoError("short write to '" + path + "'");
}

SvgAxes default_axes(const std::string& preset_name) {
  SvgAxes axes;
  if (preset_name == "fig5b") {
    axes = {.x_key = "group", .metric = "rmse_range", .log_y = true,
            .title = "range RMSE by cooperation group"};
  } else if (preset_name == "fig5c") {
    axes = {.x_key = "cooperating_stations", .metric = "rmse_range", .log_y = true,
            .title = "range RMSE vs cooperating stations"};
  } else if (preset_name == "fig5d") {
    axes = {.x_key = "cooperating_stations", .metric = "spectral_efficiency", .log_y = false,
            .title = "spectral efficiency vs cooperating stations"};
  } else if (preset_name == "fig6") {
    axes = {.x_key = "sinr_target_db", .metric = "min_power_dbm", .log_y = false,
            .title = "minimum transmit power vs SINR target"};
  } else {
    throw UnknownPreset(preset_name);
  }
  return axes;
}

}  // namespace isaccoop
