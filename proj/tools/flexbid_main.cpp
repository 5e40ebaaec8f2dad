#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flexbid/csv.hpp"
#include "flexbid/errors.hpp"
#include "flexbid/pipeline.hpp"

namespace {

using flexbid::PipelineConfig;

// Flag values land here first; they are applied on top of defaults and the
// --config file after parsing, so precedence is defaults < file < flags.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, alpha;
  std::optional<int> n_runs, in_sample_size;
  std::optional<double> gamma_lo, gamma_hi;
  std::optional<int> gamma_steps;
  std::optional<int> n_evs, n_days;
  std::optional<int> arrival_mean, arrival_spread, departure_mean, departure_spread;
  std::optional<double> battery_min, battery_max;
  std::optional<std::string> charger_levels;
  std::optional<double> plug_in_prob, energy_frac_min, energy_frac_max;
  std::optional<int> cv_draw_size, cv_reps;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key=value config file, applied before flag overrides");
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--eps", o.eps, "chance-constraint level in (0,1)");
  cmd->add_option("--alpha", o.alpha, "per-constraint budget in (0,eps]; default eps/3");
  cmd->add_option("--n-runs", o.n_runs, "number of independent runs");
  cmd->add_option("--in-sample-size", o.in_sample_size,
                  "scenarios drawn per run and hour; default from the sample-size bound");
  cmd->add_option("--gamma-lo", o.gamma_lo, "shape grid lower edge");
  cmd->add_option("--gamma-hi", o.gamma_hi, "shape grid upper edge");
  cmd->add_option("--gamma-steps", o.gamma_steps, "shape grid size");
}

void add_synth_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n-evs,--evs", o.n_evs, "fleet size");
  cmd->add_option("--n-days,--days", o.n_days, "horizon in days");
  cmd->add_option("--arrival-mean-min", o.arrival_mean, "mean arrival minute of day");
  cmd->add_option("--arrival-spread-min", o.arrival_spread, "half-width of the arrival window");
  cmd->add_option("--departure-mean-min", o.departure_mean,
                  "mean next-day departure minute of day");
  cmd->add_option("--departure-spread-min", o.departure_spread,
                  "half-width of the departure window");
  cmd->add_option("--battery-min-kwh", o.battery_min, "smallest battery capacity");
  cmd->add_option("--battery-max-kwh", o.battery_max, "largest battery capacity");
  cmd->add_option("--charger-levels-kw", o.charger_levels,
                  "comma-separated charger power levels");
  cmd->add_option("--plug-in-prob", o.plug_in_prob, "per-day plug-in probability");
  cmd->add_option("--energy-frac-min", o.energy_frac_min,
                  "lower bound on the battery fraction recharged per session");
  cmd->add_option("--energy-frac-max", o.energy_frac_max,
                  "upper bound on the battery fraction recharged per session");
}

std::vector<double> parse_level_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    if (!item.empty()) {
      try {
        out.push_back(flexbid::parse_double(item));
      } catch (const flexbid::DataError&) {
        throw flexbid::UsageError(what + ": bad value '" + item + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw flexbid::UsageError(what + ": empty list");
  return out;
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig cfg;
  if (o.config) flexbid::apply_config_file(cfg, *o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.synth.seed = *o.seed;
  }
  if (o.eps) cfg.eps = *o.eps;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.n_runs) cfg.n_runs = *o.n_runs;
  if (o.in_sample_size) cfg.in_sample_size = *o.in_sample_size;
  if (o.gamma_lo) cfg.grid.lo = *o.gamma_lo;
  if (o.gamma_hi) cfg.grid.hi = *o.gamma_hi;
  if (o.gamma_steps) cfg.grid.steps = *o.gamma_steps;
  if (o.n_evs) cfg.synth.n_evs = *o.n_evs;
  if (o.n_days) cfg.synth.n_days = *o.n_days;
  if (o.arrival_mean) cfg.synth.arrival_mean_min = *o.arrival_mean;
  if (o.arrival_spread) cfg.synth.arrival_spread_min = *o.arrival_spread;
  if (o.departure_mean) cfg.synth.departure_mean_min = *o.departure_mean;
  if (o.departure_spread) cfg.synth.departure_spread_min = *o.departure_spread;
  if (o.battery_min) cfg.synth.battery_min_kwh = *o.battery_min;
  if (o.battery_max) cfg.synth.battery_max_kwh = *o.battery_max;
  if (o.charger_levels) {
    cfg.synth.charger_levels_kw = parse_level_list(*o.charger_levels, "--charger-levels-kw");
  }
  if (o.plug_in_prob) cfg.synth.plug_in_prob = *o.plug_in_prob;
  if (o.energy_frac_min) cfg.synth.energy_frac_min = *o.energy_frac_min;
  if (o.energy_frac_max) cfg.synth.energy_frac_max = *o.energy_frac_max;
  if (o.cv_draw_size) cfg.cv_draw_size = *o.cv_draw_size;
  if (o.cv_reps) cfg.cv_reps = *o.cv_reps;
  return cfg;
}

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

std::filesystem::path sibling(const std::filesystem::path& base, const std::string& suffix) {
  return base.parent_path() / (base.stem().string() + suffix + base.extension().string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV-fleet flexibility estimation and frequency-reserve bid toolkit"};
  app.require_subcommand(1);
  Overrides o;

  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic per-minute charging dataset");
  add_common_options(synth, o);
  add_synth_options(synth, o);
  synth->add_option("--out", synth_out, "output per-minute CSV")->required();

  std::string est_in, est_out;
  auto* estimate =
      app.add_subcommand("estimate", "aggregate per-minute data into hourly flexibility floors");
  add_common_options(estimate, o);
  estimate->add_option("--in", est_in, "per-minute CSV input")->required();
  estimate->add_option("--out", est_out, "hourly flexibility CSV output")->required();

  std::string bid_hourly, bid_method, bid_out, bid_fits, bid_ks;
  auto* bid = app.add_subcommand("bid", "compute hourly reserve bids over seeded runs");
  add_common_options(bid, o);
  bid->add_option("--hourly", bid_hourly, "hourly flexibility CSV")->required();
  bid->add_option("--method", bid_method, "bidding method")
      ->required()
      ->check(CLI::IsMember({"analytical", "scenario"}));
  bid->add_option("--out", bid_out, "bids CSV output")->required();
  bid->add_option("--fits-out", bid_fits,
                  "tail-fit CSV (analytical method; default <out stem>_fits.csv)");
  bid->add_option("--ks-out", bid_ks,
                  "goodness-of-fit CSV (analytical method; default <out stem>_ks.csv)");

  std::string val_hourly, val_bids, val_out, val_json;
  auto* validate = app.add_subcommand(
      "validate", "recount out-of-sample violations for stored bids on deterministic splits");
  add_common_options(validate, o);
  validate->add_option("--hourly", val_hourly, "hourly flexibility CSV")->required();
  validate->add_option("--bids", val_bids, "bids CSV")->required();
  validate->add_option("--out", val_out, "validation CSV output")->required();
  validate->add_option("--json", val_json, "optional JSON mirror of the validation table");

  std::string sweep_fits, sweep_out, sweep_json;
  std::string sweep_alphas = "0.1,0.0333,0.01,0.005,0.0005";
  auto* sweep = app.add_subcommand("sweep", "re-solve analytical bids over an alpha grid");
  add_common_options(sweep, o);
  sweep->add_option("--fits", sweep_fits, "tail-fit CSV from the bid step")->required();
  sweep->add_option("--alphas", sweep_alphas, "comma-separated alpha grid");
  sweep->add_option("--out", sweep_out, "sweep CSV output")->required();
  sweep->add_option("--json", sweep_json, "optional JSON mirror with per-hour feasibility");

  std::string rep_hourly, rep_fits, rep_prices, rep_dir;
  std::vector<std::string> rep_bids;
  auto* report =
      app.add_subcommand("report", "summary tables, quantile-stability report, and SVG plots");
  add_common_options(report, o);
  report->add_option("--cv-draw-size", o.cv_draw_size,
                     "subsample size for the quantile-stability report");
  report->add_option("--cv-reps", o.cv_reps, "resampling repetitions");
  report->add_option("--hourly", rep_hourly, "hourly flexibility CSV")->required();
  report->add_option("--bids", rep_bids, "bids CSV; repeat to merge both methods")->required();
  report->add_option("--fits", rep_fits, "tail-fit CSV")->required();
  report->add_option("--prices", rep_prices, "optional day,hour price CSV for revenue");
  report->add_option("--out-dir", rep_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(flexbid::ExitCode::usage);
  }

  try {
    const PipelineConfig cfg = resolve(o);
    if (synth->parsed()) {
      flexbid::cmd_synth(cfg, synth_out);
    } else if (estimate->parsed()) {
      flexbid::cmd_estimate(cfg, est_in, est_out);
    } else if (bid->parsed()) {
      const std::filesystem::path out = bid_out;
      const std::filesystem::path fits =
          bid_fits.empty() ? sibling(out, "_fits") : std::filesystem::path(bid_fits);
      const std::filesystem::path ks =
          bid_ks.empty() ? sibling(out, "_ks") : std::filesystem::path(bid_ks);
      flexbid::cmd_bid(cfg, bid_hourly, bid_method, out, fits, ks);
    } else if (validate->parsed()) {
      flexbid::cmd_validate(cfg, val_hourly, val_bids, val_out, opt_path(val_json));
    } else if (sweep->parsed()) {
      flexbid::cmd_sweep(cfg, sweep_fits, parse_level_list(sweep_alphas, "--alphas"), sweep_out,
                         opt_path(sweep_json));
    } else if (report->parsed()) {
      const std::vector<std::filesystem::path> bids_paths(rep_bids.begin(), rep_bids.end());
      flexbid::cmd_report(cfg, rep_hourly, bids_paths, rep_fits, opt_path(rep_prices), rep_dir);
    }
  } catch (const flexbid::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(flexbid::ExitCode::usage);
  } catch (const flexbid::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(flexbid::ExitCode::data);
  } catch (const flexbid::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(flexbid::ExitCode::numerical);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(flexbid::ExitCode::numerical);
  }
  return 0;
}
