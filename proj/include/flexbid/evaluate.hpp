#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flexbid/gof.hpp"
#include "flexbid/ingest.hpp"
#include "flexbid/solvers.hpp"
#include "flexbid/weibull.hpp"

namespace flexbid {

// Flexibility direction indices used across fit/KS/CV records.
enum class Flex : int { up = 0, down = 1, e20 = 2 };
inline constexpr std::array<const char*, 3> kFlexNames = {"up", "down", "e20"};
Flex flex_from_name(const std::string& name);

struct ValidationReport {
  std::size_t n_oos = 0;
  std::size_t violations_up = 0;
  std::size_t violations_down = 0;
  std::size_t violations_e20 = 0;
  std::size_t violations_joint = 0;  // scenarios with at least one violation
  double joint_rate = 0.0;
};

// Ex-post check of a bid against held-out realizations: an up violation is
// 0.2*b_down + b_up > r_up, a down violation b_down > r_down, an energy
// violation b_down > r_e20; each scenario counts at most once toward joint.
ValidationReport count_violations(const Bid& bid, const std::vector<Scenario>& oos);

struct TailFitRecord {
  int hour = 0;
  Flex flex = Flex::up;
  bool ok = false;  // false: tail too small or fit failed; solver treats cap as 0
  double threshold_kw = 0.0;
  WeibullParams params;
  int n_tail = 0;
  double nll = 0.0;
  bool boundary = false;
};

struct KsRecord {
  int hour = 0;
  Flex flex = Flex::up;
  bool ok = false;
  KsResult result;
};

struct HourOutcome {
  int hour = 0;
  std::array<TailFitRecord, 3> fits;
  std::array<KsRecord, 3> ks;
  AnalyticalBid analytical;
  ScenarioBid scenario;
  ValidationReport analytical_validation;
  ValidationReport scenario_validation;
  std::uint64_t split_digest = 0;  // fingerprint of the in-sample index set
};

struct RunOutcome {
  int run = 0;
  std::vector<HourOutcome> hours;
};

struct MethodHourStats {
  double b_up_mean = 0.0, b_up_sd = 0.0;
  double b_down_mean = 0.0, b_down_sd = 0.0;
  double joint_rate_mean = 0.0, joint_rate_sd = 0.0;
};

struct RunSummary {
  int n_runs = 0;
  std::vector<int> hours;
  std::vector<MethodHourStats> analytical;  // parallel to hours
  std::vector<MethodHourStats> scenario;
};

struct ExperimentConfig {
  int n_runs = 10;
  int in_sample_size = 216;
  double eps = 0.1;
  double alpha = -1.0;  // < 0: use eps / 3 (equal split across 3 constraints)
  std::uint64_t seed = 7;
  GammaGrid grid;

  double resolved_alpha() const { return alpha < 0.0 ? eps / 3.0 : alpha; }
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  RunSummary summary;
};

// Per-hour sample pools: pools[h] holds one (r_up, r_down, r_e20) triple per
// day for hour-of-day h.
using HourlyPools = std::map<int, std::vector<Scenario>>;

HourlyPools build_pools(const std::vector<HourlyFlexSample>& samples);

// The multi-run protocol: per run and hour, draw an in-sample set without
// replacement (sub-seeded by run and hour so partial reruns reproduce), fit
// the three tails, bid with both methods, and validate on the complement.
// Splits depend only on (seed, run, hour), never on the method.
ExperimentResult run_experiment(const HourlyPools& pools, const ExperimentConfig& cfg);

// Fits and KS tests for one in-sample set (used by run_experiment; exposed
// so file-based drivers can re-derive tails for plotting).
std::array<TailFitRecord, 3> fit_hour_tails(const std::vector<Scenario>& in_sample, int hour,
                                            double eps, const GammaGrid& grid);
AnalyticalInputs analytical_inputs_from_fits(const std::array<TailFitRecord, 3>& fits,
                                             double eps);

// Deterministic in-sample index set for (seed, run, hour).
std::vector<std::size_t> split_indices(std::uint64_t seed, int run, int hour,
                                       std::size_t pool_size, std::size_t in_sample_size);

struct PricePoint {
  double pi_up = 0.0;    // EUR per kW per hour
  double pi_down = 0.0;
};

using DayHour = std::pair<std::int64_t, int>;

// Capacity revenue sum(b_up * pi_up + b_down * pi_down) over the bid grid.
// Every bid key must have a price row.
double revenue(const std::map<DayHour, Bid>& bids, const std::map<DayHour, PricePoint>& prices);

struct CvRecord {
  int hour = 0;
  Flex flex = Flex::up;
  double mean = 0.0;
  double sd = 0.0;
  double cv = 0.0;
  bool ok = false;  // false when mean == 0 (cv undefined)
};

// Stability of the empirical eps-quantile under resampling: repeatedly draw
// draw_size samples without replacement from each (hour, flexibility) pool
// and report mean/sd/cv of the quantile. Deterministic in seed; pool order
// does not matter.
std::vector<CvRecord> quantile_cv(const HourlyPools& pools, std::size_t draw_size,
                                  int n_reps, double eps, std::uint64_t seed);

struct SweepPoint {
  double alpha = 0.0;
  double total_bid_kw = 0.0;   // sum over hours of b_up + b_down
  double down_fraction = 0.0;  // share of the total contributed by b_down
  std::vector<std::pair<int, bool>> hour_feasible;
};

struct SweepCurve {
  int run = 0;
  std::vector<SweepPoint> points;
};

// Re-solves the analytical bid over an alpha grid using the per-hour tail
// models of each run. Infeasible hours contribute zero to the totals.
std::vector<SweepCurve> sensitivity_sweep(
    const std::vector<std::pair<int, std::map<int, AnalyticalInputs>>>& inputs_per_run,
    const std::vector<double>& alpha_grid, double eps);

}  // namespace flexbid
