#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexbid/evaluate.hpp"
#include "flexbid/synth.hpp"

namespace flexbid {

inline constexpr const char* kToolVersion = "flexbid 1.0.0";

// Everything a subcommand needs, resolvable from defaults, a key=value
// config file, and command-line overrides (in that precedence order).
struct PipelineConfig {
  double eps = 0.1;
  double alpha = -1.0;       // < 0: eps / 3
  int n_runs = 10;
  int in_sample_size = -1;   // < 0: sample-size formula at (eps, 0.01, 2)
  std::uint64_t seed = 7;
  GammaGrid grid;
  SynthFleetConfig synth;    // synth.seed mirrors `seed`
  int cv_draw_size = -1;     // < 0: in-sample size (clamped to the pool)
  int cv_reps = 5000;

  double resolved_alpha() const;
  int resolved_in_sample_size() const;
  ExperimentConfig experiment_config() const;
};

// Parses `key=value` lines ('#' comments and blank lines ignored); unknown
// keys are rejected. Applied on top of the given config.
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

// Validates cross-field constraints (eps range, alpha vs eps, run counts,
// gamma grid, synthetic-fleet parameters). Throws UsageError.
void validate_pipeline_config(const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Artifact rows for the bid / fits / KS / prices CSV schemas.

struct BidRow {
  int run = 0;
  int hour = 0;
  std::string method;  // "analytical" | "scenario"
  double alpha = 0.0;  // eps/3 default for analytical; eps for scenario
  double b_up_kw = 0.0;
  double b_down_kw = 0.0;
  bool feasible = false;
};

struct FitRow {
  int run = 0;
  int hour = 0;
  Flex flex = Flex::up;
  double threshold_kw = 0.0;
  double kappa = 0.0;  // NaN for no-fit rows
  double gamma = 0.0;  // NaN for no-fit rows
  int n_tail = 0;
  double nll = 0.0;    // NaN for no-fit rows
};

std::vector<BidRow> read_bids_csv(const std::filesystem::path& path);
std::vector<FitRow> read_fits_csv(const std::filesystem::path& path);
std::map<DayHour, PricePoint> read_prices_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Subcommand drivers. Each throws Usage/Data/NumericalError on failure; the
// CLI maps exception types to exit codes. All outputs carry a '#' manifest
// (tool version, parameters, input digests) and are written atomically.

void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_csv);

void cmd_estimate(const PipelineConfig& cfg, const std::filesystem::path& minute_csv,
                  const std::filesystem::path& hourly_csv);

void cmd_bid(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
             const std::string& method, const std::filesystem::path& bids_csv,
             const std::filesystem::path& fits_csv, const std::filesystem::path& ks_csv);

void cmd_validate(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
                  const std::filesystem::path& bids_csv, const std::filesystem::path& out_csv,
                  const std::optional<std::filesystem::path>& out_json);

void cmd_sweep(const PipelineConfig& cfg, const std::filesystem::path& fits_csv,
               const std::vector<double>& alpha_grid, const std::filesystem::path& out_csv,
               const std::optional<std::filesystem::path>& out_json);

void cmd_report(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
                const std::vector<std::filesystem::path>& bids_csvs,
                const std::filesystem::path& fits_csv,
                const std::optional<std::filesystem::path>& prices_csv,
                const std::filesystem::path& out_dir);

}  // namespace flexbid
