#include "flexbid/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexbid/csv.hpp"
#include "flexbid/errors.hpp"
#include "flexbid/rng.hpp"
#include "flexbid/stats.hpp"

namespace flexbid {

namespace {

constexpr std::uint64_t kTagSplit = 0x53504c4954000001ULL;
constexpr std::uint64_t kTagCv = 0x5143560000000001ULL;

double component(const Scenario& s, Flex f) {
  switch (f) {
    case Flex::up: return s.r_up;
    case Flex::down: return s.r_down;
    case Flex::e20: return s.r_e20;
  }
  throw UsageError("unknown flexibility index");
}

}  // namespace

Flex flex_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kFlexNames.size(); ++i) {
    if (name == kFlexNames[i]) return static_cast<Flex>(static_cast<int>(i));
  }
  throw DataError("unknown flexibility name '" + name + "'");
}

ValidationReport count_violations(const Bid& bid, const std::vector<Scenario>& oos) {
  if (oos.empty()) throw DataError("count_violations: empty out-of-sample set");
  ValidationReport report;
  report.n_oos = oos.size();
  for (const auto& s : oos) {
    const bool up = 0.2 * bid.b_down_kw + bid.b_up_kw > s.r_up;
    const bool down = bid.b_down_kw > s.r_down;
    const bool e20 = bid.b_down_kw > s.r_e20;
    report.violations_up += up;
    report.violations_down += down;
    report.violations_e20 += e20;
    report.violations_joint += (up || down || e20);
  }
  report.joint_rate =
      static_cast<double>(report.violations_joint) / static_cast<double>(report.n_oos);
  return report;
}

HourlyPools build_pools(const std::vector<HourlyFlexSample>& samples) {
  HourlyPools pools;
  for (const auto& s : samples) {
    pools[s.hour].push_back(Scenario{s.r_up_kw, s.r_down_kw, s.r_e20_kw});
  }
  return pools;
}

std::vector<std::size_t> split_indices(std::uint64_t seed, int run, int hour,
                                       std::size_t pool_size, std::size_t in_sample_size) {
  Rng rng(derive_seed(seed, {kTagSplit, static_cast<std::uint64_t>(run),
                             static_cast<std::uint64_t>(hour)}));
  return sample_without_replacement(pool_size, in_sample_size, rng);
}

std::array<TailFitRecord, 3> fit_hour_tails(const std::vector<Scenario>& in_sample, int hour,
                                            double eps, const GammaGrid& grid) {
  std::array<TailFitRecord, 3> fits;
  for (int f = 0; f < 3; ++f) {
    TailFitRecord& rec = fits[static_cast<std::size_t>(f)];
    rec.hour = hour;
    rec.flex = static_cast<Flex>(f);
    std::vector<double> values;
    values.reserve(in_sample.size());
    for (const auto& s : in_sample) values.push_back(component(s, rec.flex));
    try {
      rec.threshold_kw = empirical_quantile(values, eps);
      const std::vector<double> tail = extract_tail(values, rec.threshold_kw);
      rec.n_tail = static_cast<int>(tail.size());
      const WeibullFit fit = fit_weibull_mle(tail, grid);
      rec.params = fit.params;
      rec.nll = -fit.loglik;
      rec.boundary = fit.boundary;
      rec.ok = true;
    } catch (const DataError&) {
      rec.ok = false;  // empty tail (degenerate pool): no-fit record
    } catch (const NumericalError&) {
      rec.ok = false;  // tail too small or likelihood overflow
    }
  }
  return fits;
}

AnalyticalInputs analytical_inputs_from_fits(const std::array<TailFitRecord, 3>& fits,
                                             double eps) {
  AnalyticalInputs inputs;
  inputs.eps = eps;
  auto to_model = [](const TailFitRecord& rec) {
    FlexTailModel model;
    model.threshold = rec.threshold_kw;
    model.params = rec.params;
    model.has_fit = rec.ok;
    return model;
  };
  inputs.up = to_model(fits[0]);
  inputs.down = to_model(fits[1]);
  inputs.e20 = to_model(fits[2]);
  return inputs;
}

namespace {

KsRecord ks_for_fit(const TailFitRecord& fit, const std::vector<Scenario>& in_sample) {
  KsRecord rec;
  rec.hour = fit.hour;
  rec.flex = fit.flex;
  rec.ok = false;
  if (!fit.ok) return rec;
  std::vector<double> values;
  values.reserve(in_sample.size());
  for (const auto& s : in_sample) values.push_back(component(s, fit.flex));
  const std::vector<double> tail = extract_tail(values, fit.threshold_kw);
  const WeibullParams params = fit.params;
  rec.result = ks_test(tail, [params](double x) { return weibull_cdf(params, x); });
  rec.ok = true;
  return rec;
}

MethodHourStats stats_over_runs(const std::vector<double>& b_up, const std::vector<double>& b_down,
                                const std::vector<double>& rates) {
  MethodHourStats stats;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  stats.b_up_mean = mean(b_up);
  stats.b_down_mean = mean(b_down);
  stats.joint_rate_mean = mean(rates);
  const bool have_sd = b_up.size() >= 2;
  stats.b_up_sd = have_sd ? sample_sd(b_up) : nan;
  stats.b_down_sd = have_sd ? sample_sd(b_down) : nan;
  stats.joint_rate_sd = have_sd ? sample_sd(rates) : nan;
  return stats;
}

}  // namespace

ExperimentResult run_experiment(const HourlyPools& pools, const ExperimentConfig& cfg) {
  if (cfg.n_runs < 1) throw UsageError("run_experiment: n_runs must be >= 1");
  if (cfg.in_sample_size < 2) throw UsageError("run_experiment: in_sample_size must be >= 2");
  if (!(cfg.eps > 0.0) || !(cfg.eps < 1.0)) throw UsageError("run_experiment: eps in (0,1)");
  const double alpha = cfg.resolved_alpha();
  if (!(alpha > 0.0) || alpha > cfg.eps) {
    throw UsageError("run_experiment: alpha must lie in (0, eps]");
  }
  if (pools.empty()) throw DataError("run_experiment: no hourly pools");
  for (const auto& [hour, pool] : pools) {
    if (pool.size() <= static_cast<std::size_t>(cfg.in_sample_size)) {
      throw DataError("run_experiment: hour " + std::to_string(hour) + " has only " +
                      std::to_string(pool.size()) +
                      " samples; in-sample size leaves no out-of-sample data");
    }
  }

  ExperimentResult result;
  result.runs.reserve(static_cast<std::size_t>(cfg.n_runs));
  for (int run = 0; run < cfg.n_runs; ++run) {
    RunOutcome outcome;
    outcome.run = run;
    for (const auto& [hour, pool] : pools) {
      const auto idx = split_indices(cfg.seed, run, hour, pool.size(),
                                     static_cast<std::size_t>(cfg.in_sample_size));
      std::vector<Scenario> in_sample;
      std::vector<Scenario> oos;
      in_sample.reserve(idx.size());
      oos.reserve(pool.size() - idx.size());
      std::size_t next = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (next < idx.size() && idx[next] == i) {
          in_sample.push_back(pool[i]);
          ++next;
        } else {
          oos.push_back(pool[i]);
        }
      }

      HourOutcome hour_outcome;
      hour_outcome.hour = hour;
      std::string digest_input;
      for (std::size_t i : idx) {
        digest_input += std::to_string(i);
        digest_input += ',';
      }
      hour_outcome.split_digest = fnv1a64(digest_input);

      hour_outcome.fits = fit_hour_tails(in_sample, hour, cfg.eps, cfg.grid);
      for (int f = 0; f < 3; ++f) {
        hour_outcome.ks[static_cast<std::size_t>(f)] =
            ks_for_fit(hour_outcome.fits[static_cast<std::size_t>(f)], in_sample);
      }
      hour_outcome.analytical =
          analytical_bid(analytical_inputs_from_fits(hour_outcome.fits, cfg.eps), alpha);
      hour_outcome.scenario = scenario_bid(in_sample, cfg.eps);
      hour_outcome.analytical_validation = count_violations(hour_outcome.analytical.bid, oos);
      hour_outcome.scenario_validation = count_violations(hour_outcome.scenario.bid, oos);
      outcome.hours.push_back(std::move(hour_outcome));
    }
    result.runs.push_back(std::move(outcome));
  }

  RunSummary& summary = result.summary;
  summary.n_runs = cfg.n_runs;
  for (const auto& [hour, pool] : pools) {
    (void)pool;
    summary.hours.push_back(hour);
  }
  for (std::size_t h = 0; h < summary.hours.size(); ++h) {
    std::vector<double> a_up, a_down, a_rate, s_up, s_down, s_rate;
    for (const auto& run : result.runs) {
      const HourOutcome& ho = run.hours[h];
      a_up.push_back(ho.analytical.bid.b_up_kw);
      a_down.push_back(ho.analytical.bid.b_down_kw);
      a_rate.push_back(ho.analytical_validation.joint_rate);
      s_up.push_back(ho.scenario.bid.b_up_kw);
      s_down.push_back(ho.scenario.bid.b_down_kw);
      s_rate.push_back(ho.scenario_validation.joint_rate);
    }
    summary.analytical.push_back(stats_over_runs(a_up, a_down, a_rate));
    summary.scenario.push_back(stats_over_runs(s_up, s_down, s_rate));
  }
  return result;
}

double revenue(const std::map<DayHour, Bid>& bids, const std::map<DayHour, PricePoint>& prices) {
  double total = 0.0;
  std::string missing;
  for (const auto& [key, bid] : bids) {
    const auto it = prices.find(key);
    if (it == prices.end()) {
      if (!missing.empty()) missing += ", ";
      missing += "(day " + std::to_string(key.first) + ", hour " + std::to_string(key.second) + ")";
      continue;
    }
    total += bid.b_up_kw * it->second.pi_up + bid.b_down_kw * it->second.pi_down;
  }
  if (!missing.empty()) {
    throw DataError("revenue: missing price rows for " + missing);
  }
  return total;
}

std::vector<CvRecord> quantile_cv(const HourlyPools& pools, std::size_t draw_size,
                                  int n_reps, double eps, std::uint64_t seed) {
  if (n_reps < 2) throw UsageError("quantile_cv: need at least 2 repetitions");
  std::vector<CvRecord> records;
  for (const auto& [hour, pool] : pools) {
    if (draw_size > pool.size()) {
      throw DataError("quantile_cv: draw size " + std::to_string(draw_size) +
                      " exceeds pool size " + std::to_string(pool.size()) + " at hour " +
                      std::to_string(hour));
    }
    for (int f = 0; f < 3; ++f) {
      const Flex flex = static_cast<Flex>(f);
      std::vector<double> values;
      values.reserve(pool.size());
      for (const auto& s : pool) values.push_back(component(s, flex));
      std::sort(values.begin(), values.end());  // pool-order invariance

      Rng rng(derive_seed(seed, {kTagCv, static_cast<std::uint64_t>(hour),
                                 static_cast<std::uint64_t>(f)}));
      std::vector<double> quantiles;
      quantiles.reserve(static_cast<std::size_t>(n_reps));
      std::vector<double> draw(draw_size);
      for (int rep = 0; rep < n_reps; ++rep) {
        const auto idx = sample_without_replacement(values.size(), draw_size, rng);
        for (std::size_t i = 0; i < idx.size(); ++i) draw[i] = values[idx[i]];
        quantiles.push_back(empirical_quantile(draw, eps));
      }
      CvRecord rec;
      rec.hour = hour;
      rec.flex = flex;
      rec.mean = mean(quantiles);
      rec.sd = sample_sd(quantiles);
      if (rec.mean != 0.0) {
        rec.cv = rec.sd / rec.mean;
        rec.ok = true;
      } else {
        rec.cv = std::numeric_limits<double>::quiet_NaN();
        rec.ok = false;
      }
      records.push_back(rec);
    }
  }
  return records;
}

std::vector<SweepCurve> sensitivity_sweep(
    const std::vector<std::pair<int, std::map<int, AnalyticalInputs>>>& inputs_per_run,
    const std::vector<double>& alpha_grid, double eps) {
  if (alpha_grid.empty()) throw UsageError("sensitivity_sweep: empty alpha grid");
  for (double alpha : alpha_grid) {
    if (!(alpha > 0.0) || alpha > eps) {
      throw UsageError("sensitivity_sweep: every alpha must lie in (0, eps]");
    }
  }
  std::vector<SweepCurve> curves;
  curves.reserve(inputs_per_run.size());
  for (const auto& [run, by_hour] : inputs_per_run) {
    SweepCurve curve;
    curve.run = run;
    for (double alpha : alpha_grid) {
      SweepPoint point;
      point.alpha = alpha;
      double down_total = 0.0;
      for (const auto& [hour, inputs] : by_hour) {
        const AnalyticalBid bid = analytical_bid(inputs, alpha);
        point.hour_feasible.emplace_back(hour, bid.feasible);
        if (bid.feasible) {
          point.total_bid_kw += bid.bid.b_up_kw + bid.bid.b_down_kw;
          down_total += bid.bid.b_down_kw;
        }
      }
      point.down_fraction = point.total_bid_kw > 0.0 ? down_total / point.total_bid_kw : 0.0;
      curve.points.push_back(std::move(point));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace flexbid
