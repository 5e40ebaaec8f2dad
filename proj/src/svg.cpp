#include "flexbid/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flexbid {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

constexpr const char* kColorUp = "#4472c4";
constexpr const char* kColorDown = "#ed7d31";
constexpr const char* kColorScenarioUp = "#7ca6dc";
constexpr const char* kColorScenarioDown = "#f2ab7f";

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// Rounds up to a "nice" axis maximum (1/2/5 times a power of ten).
double nice_max(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (v <= mult * mag) return mult * mag;
  }
  return 10.0 * mag;
}

struct Canvas {
  std::ostringstream out;

  explicit Canvas(const std::string& comment, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    if (!comment.empty()) out << "<!--\n" << comment << "-->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 22, title, 16, "middle", "#222222");
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0) {
    if (h <= 0.0 || w <= 0.0) return;
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" fill-opacity=\""
        << fmt(opacity) << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0, bool dashed = false) {
    out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
        << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << fmt(width) << "\"";
    if (dashed) out << " stroke-dasharray=\"6,4\"";
    out << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width = 2.0) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width)
        << "\" points=\"";
    for (const auto& [x, y] : pts) out << fmt(x) << "," << fmt(y) << " ";
    out << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
               double opacity) {
    out << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity) << "\" points=\"";
    for (const auto& [x, y] : pts) out << fmt(x) << "," << fmt(y) << " ";
    out << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r)
        << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12,
            const std::string& anchor = "middle", const std::string& fill = "#333333") {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\""
        << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
        << "\">" << s << "</text>\n";
  }

  // Frame plus y ticks; y axis spans [0, ymax] mapped onto the plot area.
  void axes(double ymax, const std::string& ylabel, const std::string& xlabel) {
    line(kLeft, kTop, kLeft, kTop + kPlotH, "#444444", 1.2);
    line(kLeft, kTop + kPlotH, kLeft + kPlotW, kTop + kPlotH, "#444444", 1.2);
    for (int i = 0; i <= 5; ++i) {
      const double frac = static_cast<double>(i) / 5.0;
      const double y = kTop + kPlotH * (1.0 - frac);
      line(kLeft - 4, y, kLeft, y, "#444444", 1.0);
      if (i > 0) line(kLeft, y, kLeft + kPlotW, y, "#dddddd", 0.6);
      text(kLeft - 8, y + 4, fmt(ymax * frac), 11, "end");
    }
    text(18, kTop + kPlotH / 2, ylabel, 12, "middle");
    text(kLeft + kPlotW / 2, kHeight - 14, xlabel, 12, "middle");
  }

  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

double y_of(double value, double ymax) {
  return kTop + kPlotH * (1.0 - std::min(value / ymax, 1.0));
}

}  // namespace

std::string render_bid_bars(const std::vector<BarGroup>& groups, const std::string& comment) {
  Canvas canvas(comment, "Mean hourly bids");
  double ymax = 0.0;
  for (const auto& g : groups) {
    ymax = std::max({ymax, g.a_up + g.a_down, g.s_up + g.s_down});
  }
  ymax = nice_max(ymax);
  canvas.axes(ymax, "kW", "hour of day");

  const double slot = kPlotW / std::max<std::size_t>(groups.size(), 1);
  const double bar = slot * 0.35;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double x0 = kLeft + slot * static_cast<double>(i);
    if (g.has_analytical) {
      const double y_up = y_of(g.a_up, ymax);
      const double y_all = y_of(g.a_up + g.a_down, ymax);
      canvas.rect(x0 + slot * 0.1, y_up, bar, kTop + kPlotH - y_up, kColorUp);
      canvas.rect(x0 + slot * 0.1, y_all, bar, y_up - y_all, kColorDown);
    }
    if (g.has_scenario) {
      const double y_up = y_of(g.s_up, ymax);
      const double y_all = y_of(g.s_up + g.s_down, ymax);
      canvas.rect(x0 + slot * 0.55, y_up, bar, kTop + kPlotH - y_up, kColorScenarioUp);
      canvas.rect(x0 + slot * 0.55, y_all, bar, y_up - y_all, kColorScenarioDown);
    }
    if (groups.size() <= 30) {
      canvas.text(x0 + slot / 2, kTop + kPlotH + 16, std::to_string(g.hour), 10);
    }
  }
  canvas.rect(kLeft + 8, kTop + 6, 12, 12, kColorUp);
  canvas.text(kLeft + 24, kTop + 16, "up (solid: analytical, pale: scenario)", 11, "start");
  canvas.rect(kLeft + 8, kTop + 24, 12, 12, kColorDown);
  canvas.text(kLeft + 24, kTop + 34, "down (stacked)", 11, "start");
  return canvas.finish();
}

std::string render_rate_bars(const std::vector<RateGroup>& groups, double eps,
                             const std::string& comment) {
  Canvas canvas(comment, "Mean joint out-of-sample violation rate");
  double ymax = eps * 1.5;
  for (const auto& g : groups) ymax = std::max({ymax, g.analytical, g.scenario});
  ymax = nice_max(ymax);
  canvas.axes(ymax, "rate", "hour of day");

  const double slot = kPlotW / std::max<std::size_t>(groups.size(), 1);
  const double bar = slot * 0.35;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double x0 = kLeft + slot * static_cast<double>(i);
    if (g.has_analytical) {
      const double y = y_of(g.analytical, ymax);
      canvas.rect(x0 + slot * 0.1, y, bar, kTop + kPlotH - y, kColorUp);
    }
    if (g.has_scenario) {
      const double y = y_of(g.scenario, ymax);
      canvas.rect(x0 + slot * 0.55, y, bar, kTop + kPlotH - y, kColorScenarioUp);
    }
    if (groups.size() <= 30) {
      canvas.text(x0 + slot / 2, kTop + kPlotH + 16, std::to_string(g.hour), 10);
    }
  }
  const double eps_y = y_of(eps, ymax);
  canvas.line(kLeft, eps_y, kLeft + kPlotW, eps_y, "#c00000", 1.5, true);
  canvas.text(kLeft + kPlotW - 4, eps_y - 6, "target level", 11, "end", "#c00000");
  canvas.rect(kLeft + 8, kTop + 6, 12, 12, kColorUp);
  canvas.text(kLeft + 24, kTop + 16, "analytical", 11, "start");
  canvas.rect(kLeft + 8, kTop + 24, 12, 12, kColorScenarioUp);
  canvas.text(kLeft + 24, kTop + 34, "scenario", 11, "start");
  return canvas.finish();
}

std::string render_sensitivity(const std::vector<SensitivityPoint>& points,
                               const std::string& comment) {
  Canvas canvas(comment, "Total daily bid vs violation level");
  double ymax = 0.0;
  for (const auto& p : points) ymax = std::max(ymax, p.ci_hi);
  ymax = nice_max(ymax);
  canvas.axes(ymax, "kW", "alpha (log scale)");

  if (points.empty()) return canvas.finish();
  double lo = std::log10(points.front().alpha);
  double hi = lo;
  for (const auto& p : points) {
    lo = std::min(lo, std::log10(p.alpha));
    hi = std::max(hi, std::log10(p.alpha));
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto x_of = [&](double alpha) {
    return kLeft + kPlotW * (std::log10(alpha) - lo) / (hi - lo);
  };

  std::vector<std::pair<double, double>> band;
  for (const auto& p : points) band.emplace_back(x_of(p.alpha), y_of(p.ci_hi, ymax));
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    band.emplace_back(x_of(it->alpha), y_of(it->ci_lo, ymax));
  }
  canvas.polygon(band, "#999999", 0.35);

  std::vector<std::pair<double, double>> curve;
  for (const auto& p : points) curve.emplace_back(x_of(p.alpha), y_of(p.mean_total, ymax));
  canvas.polyline(curve, kColorUp, 2.0);
  for (const auto& p : points) {
    canvas.circle(x_of(p.alpha), y_of(p.mean_total, ymax), 3.5, kColorUp);
    canvas.text(x_of(p.alpha), kTop + kPlotH + 16, fmt(p.alpha), 10);
  }
  canvas.text(kLeft + kPlotW - 4, kTop + 16, "band: 95% confidence interval over runs", 11,
              "end", "#666666");
  return canvas.finish();
}

std::string render_cdf_overlay(const std::vector<double>& tail, const WeibullParams& params,
                               const std::string& label, const std::string& comment) {
  Canvas canvas(comment, "Tail fit: empirical vs fitted CDF");
  std::vector<double> sorted(tail);
  std::sort(sorted.begin(), sorted.end());
  const double xmax = sorted.empty() ? 1.0 : nice_max(sorted.back() * 1.05);
  canvas.axes(1.0, "F(x)", "tail shortfall x (kW)");
  auto x_of = [&](double x) { return kLeft + kPlotW * std::min(x / xmax, 1.0); };

  // ECDF staircase.
  const auto n = sorted.size();
  std::vector<std::pair<double, double>> steps;
  steps.emplace_back(x_of(0.0), y_of(0.0, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double fy = static_cast<double>(i + 1) / static_cast<double>(n);
    steps.emplace_back(x_of(sorted[i]), y_of(static_cast<double>(i) / static_cast<double>(n), 1.0));
    steps.emplace_back(x_of(sorted[i]), y_of(fy, 1.0));
  }
  steps.emplace_back(x_of(xmax), y_of(1.0, 1.0));
  canvas.polyline(steps, "#555555", 1.5);

  // Fitted CDF sampled densely.
  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i <= 200; ++i) {
    const double x = xmax * static_cast<double>(i) / 200.0;
    curve.emplace_back(x_of(x), y_of(weibull_cdf(params, x), 1.0));
  }
  canvas.polyline(curve, kColorDown, 2.0);

  canvas.text(kLeft + kPlotW - 4, kTop + 16, label, 11, "end", "#666666");
  canvas.line(kLeft + 10, kTop + 28, kLeft + 34, kTop + 28, "#555555", 1.5);
  canvas.text(kLeft + 40, kTop + 32, "empirical", 11, "start");
  canvas.line(kLeft + 10, kTop + 44, kLeft + 34, kTop + 44, kColorDown, 2.0);
  canvas.text(kLeft + 40, kTop + 48, "fitted", 11, "start");

  // x tick labels (the y axis labels come from axes()).
  for (int i = 0; i <= 5; ++i) {
    const double frac = static_cast<double>(i) / 5.0;
    canvas.text(kLeft + kPlotW * frac, kTop + kPlotH + 16, fmt(xmax * frac), 10);
  }
  return canvas.finish();
}

}  // namespace flexbid
