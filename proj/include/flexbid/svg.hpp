#pragma once

#include <string>
#include <vector>

#include "flexbid/weibull.hpp"

namespace flexbid {

// Static SVG renderers for the report plots. Each returns a complete SVG
// document; `comment` is embedded verbatim as an XML comment (provenance
// manifest). All layouts are fixed-size 800x480 with margins for axes.

struct BarGroup {
  int hour = 0;
  double a_up = 0.0;    // analytical b_up mean
  double a_down = 0.0;  // analytical b_down mean
  double s_up = 0.0;    // scenario b_up mean
  double s_down = 0.0;  // scenario b_down mean
  bool has_analytical = false;
  bool has_scenario = false;
};

std::string render_bid_bars(const std::vector<BarGroup>& groups, const std::string& comment);

struct RateGroup {
  int hour = 0;
  double analytical = 0.0;
  double scenario = 0.0;
  bool has_analytical = false;
  bool has_scenario = false;
};

// Violation-rate bars with a dashed line at the chance-constraint level eps.
std::string render_rate_bars(const std::vector<RateGroup>& groups, double eps,
                             const std::string& comment);

struct SensitivityPoint {
  double alpha = 0.0;
  double mean_total = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Mean total bid vs alpha (log10 x-axis) with a gray confidence band.
std::string render_sensitivity(const std::vector<SensitivityPoint>& points,
                               const std::string& comment);

// Empirical CDF steps of the tail samples overlaid with the fitted CDF.
std::string render_cdf_overlay(const std::vector<double>& tail, const WeibullParams& params,
                               const std::string& label, const std::string& comment);

}  // namespace flexbid
