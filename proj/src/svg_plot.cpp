#include "prvnet/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace prvnet {

namespace {

constexpr double kLeft = 70.0, kRight = 610.0, kTop = 30.0, kBottom = 360.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#8c564b"};
constexpr size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;  // (x, nmse_db), sorted by x
  std::optional<double> reference_y;           // dashed horizontal line
};

struct Tick {
  double x = 0.0;
  std::string label;
};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

Series& series_named(std::vector<Series>& all, const std::string& name) {
  for (Series& s : all)
    if (s.name == name) return s;
  all.push_back(Series{name, {}, std::nullopt});
  return all.back();
}

std::string render(const std::vector<Series>& series, const std::vector<Tick>& x_ticks,
                   const std::string& x_label) {
  double xmin = x_ticks.front().x, xmax = x_ticks.back().x;
  double ymin = 0.0, ymax = 0.0;
  bool have_y = false;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = have_y ? std::min(ymin, y) : y;
      ymax = have_y ? std::max(ymax, y) : y;
      have_y = true;
    }
    if (s.reference_y) {
      ymin = have_y ? std::min(ymin, *s.reference_y) : *s.reference_y;
      ymax = have_y ? std::max(ymax, *s.reference_y) : *s.reference_y;
      have_y = true;
    }
  }
  if (xmax <= xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  const double ypad = (ymax - ymin) > 0 ? 0.08 * (ymax - ymin) : 1.0;
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft);
  };
  const auto py = [&](double y) {
    return kTop + (ymax - y) / (ymax - ymin) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";

  // Horizontal gridlines with y labels at five evenly spaced values.
  for (int i = 0; i < 5; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    const std::string yy = num(py(y));
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + yy + "\" x2=\"" + num(kRight) + "\" y2=\"" +
           yy + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(py(y) + 4.0) +
           "\" text-anchor=\"end\">" + num(y) + "</text>\n";
  }
  for (const Tick& t : x_ticks) {
    const std::string xx = num(px(t.x));
    svg += "<line x1=\"" + xx + "\" y1=\"" + num(kBottom) + "\" x2=\"" + xx + "\" y2=\"" +
           num(kBottom + 5.0) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + xx + "\" y=\"" + num(kBottom + 20.0) + "\" text-anchor=\"middle\">" +
           t.label + "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + num((kLeft + kRight) / 2.0) + "\" y=\"" + num(kBottom + 40.0) +
         "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2.0) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + num((kTop + kBottom) / 2.0) +
         ")\">NMSE (dB)</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kPalette[i % kPaletteSize];
    if (!s.pts.empty()) {
      std::string points;
      for (const auto& [x, y] : s.pts) {
        if (!points.empty()) points += ' ';
        points += num(px(x)) + "," + num(py(y));
      }
      svg += std::string("<polyline fill=\"none\" stroke=\"") + color +
             "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      for (const auto& [x, y] : s.pts) {
        svg += std::string("<circle cx=\"") + num(px(x)) + "\" cy=\"" + num(py(y)) +
               "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    }
    if (s.reference_y) {
      const std::string yy = num(py(*s.reference_y));
      svg += std::string("<line x1=\"") + num(kLeft) + "\" y1=\"" + yy + "\" x2=\"" +
             num(kRight) + "\" y2=\"" + yy + "\" stroke=\"" + color +
             "\" stroke-dasharray=\"6 4\"/>\n";
    }
    const double ly = kTop + 10.0 + 18.0 * static_cast<double>(i);
    svg += std::string("<rect x=\"") + num(kRight - 160.0) + "\" y=\"" + num(ly) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + num(kRight - 145.0) + "\" y=\"" + num(ly + 9.0) + "\">" + s.name +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string family_of(const std::string& model_id) {
  const size_t dash = model_id.find('-');
  return dash == std::string::npos ? model_id : model_id.substr(0, dash);
}

}  // namespace

std::string nmse_vs_compression_svg(const std::vector<ReportRow>& rows) {
  std::vector<Series> series;
  std::vector<double> inv_gammas;
  for (const ReportRow& r : rows) {
    if (r.snr != "clean") continue;
    if (r.gamma <= 0.0) throw std::invalid_argument("compression plot: gamma must be positive");
    const double inv = 1.0 / r.gamma;
    series_named(series, family_of(r.model_id)).pts.emplace_back(std::log2(inv), r.nmse_db);
    inv_gammas.push_back(inv);
  }
  if (series.empty()) throw std::invalid_argument("compression plot: no clean rows");
  for (Series& s : series) std::sort(s.pts.begin(), s.pts.end());
  std::sort(inv_gammas.begin(), inv_gammas.end());
  inv_gammas.erase(std::unique(inv_gammas.begin(), inv_gammas.end()), inv_gammas.end());
  std::vector<Tick> ticks;
  for (double inv : inv_gammas) ticks.push_back(Tick{std::log2(inv), num(inv, "%.6g")});
  return render(series, ticks, "1 / gamma");
}

std::string nmse_vs_snr_svg(const std::vector<ReportRow>& rows) {
  std::vector<Series> series;
  std::vector<double> snrs;
  for (const ReportRow& r : rows) {
    double snr = 0.0;
    if (parse_number(r.snr, &snr)) {
      series_named(series, r.model_id).pts.emplace_back(snr, r.nmse_db);
      snrs.push_back(snr);
    } else if (r.snr == "clean") {
      series_named(series, r.model_id).reference_y = r.nmse_db;
    }
  }
  bool any_points = false;
  for (const Series& s : series) any_points = any_points || !s.pts.empty();
  if (!any_points) throw std::invalid_argument("snr plot: no numeric-snr rows");
  for (Series& s : series) std::sort(s.pts.begin(), s.pts.end());
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
  std::vector<Tick> ticks;
  for (double snr : snrs) ticks.push_back(Tick{snr, num(snr, "%.6g")});
  return render(series, ticks, "feedback SNR (dB)");
}

}  // namespace prvnet
