// Acceptance suite: one line per criterion, [PASS]/[FAIL], exit 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "flexbid/evaluate.hpp"
#include "flexbid/ingest.hpp"
#include "flexbid/rng.hpp"
#include "flexbid/solvers.hpp"
#include "flexbid/stats.hpp"
#include "flexbid/synth.hpp"
#include "flexbid/weibull.hpp"

using namespace flexbid;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
  if (!ok) ++g_failures;
}

// --- criterion 3 helper: exhaustive reference for the scenario program -----
double brute_force_objective(const std::vector<Scenario>& sc, int k) {
  const std::size_t n = sc.size();
  double best = 0.0;
  const auto eval = [&](const std::vector<bool>& removed) {
    double u = 1e300, d_cap = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      if (removed[i]) continue;
      u = std::min(u, sc[i].r_up);
      d_cap = std::min(d_cap, std::min(sc[i].r_down, sc[i].r_e20));
    }
    if (u >= 1e300) return;
    const double b_down = std::max(0.0, std::min(d_cap, 5.0 * std::max(0.0, u)));
    const double b_up = std::max(0.0, u - 0.2 * b_down);
    best = std::max(best, b_up + b_down);
  };
  std::vector<bool> removed(n, false);
  eval(removed);
  if (k >= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      removed.assign(n, false);
      removed[i] = true;
      eval(removed);
    }
  }
  if (k >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        removed.assign(n, false);
        removed[i] = removed[j] = true;
        eval(removed);
      }
    }
  }
  return best;
}

void criterion_1() {
  const int n = required_sample_size(0.1, 0.01, 2);
  report(1, "sample-size formula", n == 216, "required_sample_size(0.1,0.01,2) = " + std::to_string(n));
}

void criterion_2() {
  bool ok = true;
  std::size_t bad_count = 0;
  for (std::uint64_t seed = 1; seed <= 200 && ok; ++seed) {
    Rng rng(seed);
    std::vector<double> r(216);
    switch (seed % 3) {
      case 0: for (auto& v : r) v = rng.uniform(0.0, 100.0); break;
      case 1: for (auto& v : r) v = rng.normal(40.0, 12.0); break;
      default: for (auto& v : r) v = weibull_sample({0.8, 1.4}, rng); break;
    }
    const auto tail = extract_tail(r, empirical_quantile(r, 0.1));
    if (tail.size() != 22) { ok = false; bad_count = tail.size(); }
  }
  report(2, "22-point tail from 216 samples", ok,
         ok ? "200/200 sample sets" : "got " + std::to_string(bad_count) + " tail points");
}

void criterion_3() {
  Rng rng(314);
  double worst = 0.0;
  int checked = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int n = static_cast<int>(rng.uniform_int(4, 12));
    const int k = static_cast<int>(rng.uniform_int(0, 2));
    std::vector<Scenario> sc(n);
    for (auto& s : sc) {
      s.r_up = rng.uniform(0.0, 10.0);
      s.r_down = rng.uniform(0.0, 10.0);
      s.r_e20 = rng.uniform(0.0, 10.0);
    }
    const double got = scenario_bid(sc, (k + 0.5) / n).objective;
    worst = std::max(worst, std::abs(got - brute_force_objective(sc, k)));
    ++checked;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d instances, max |obj gap| = %.2e", checked, worst);
  report(3, "scenario solver exactness", worst <= 1e-9, buf);
}

void criterion_4() {
  Rng rng(2718);
  double worst_rel = 0.0;
  bool constraints_ok = true;
  for (int rep = 0; rep < 1000; ++rep) {
    const double r = rng.uniform(0.0, 50.0);
    const double kappa = rng.uniform(0.02, 5.0);
    const double gamma = rng.uniform(0.15, 4.0);
    const double eps = rng.uniform(0.01, 0.5);
    const double got = bid_cap(r, kappa, gamma, eps / 3.0, eps);
    const double want = r - std::pow(std::log(3.0) / kappa, 1.0 / gamma);
    worst_rel = std::max(worst_rel, std::abs(got - want) / std::max(1.0, std::abs(want)));

    AnalyticalInputs inputs;
    inputs.eps = 0.1;
    const auto model = [&]() {
      FlexTailModel m;
      m.threshold = rng.uniform(-2.0, 30.0);
      m.params = {rng.uniform(0.05, 3.0), rng.uniform(0.2, 3.5)};
      m.has_fit = true;
      return m;
    };
    inputs.up = model();
    inputs.down = model();
    inputs.e20 = model();
    const AnalyticalBid b = analytical_bid(inputs, 0.1 / 3.0);
    if (b.feasible) {
      const double cap_sym = std::max(0.0, std::min(b.cap_down, b.cap_e20));
      constraints_ok = constraints_ok &&
                       0.2 * b.bid.b_down_kw + b.bid.b_up_kw <= b.cap_up + 1e-9 &&
                       b.bid.b_down_kw <= cap_sym + 1e-9 && b.bid.b_up_kw >= 0.0 &&
                       b.bid.b_down_kw >= 0.0 &&
                       std::abs(0.2 * b.bid.b_down_kw + b.bid.b_up_kw - b.cap_up) <= 1e-9;
    } else {
      constraints_ok = constraints_ok && b.bid.b_up_kw == 0.0 && b.bid.b_down_kw == 0.0;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max rel gap vs log3 form = %.2e", worst_rel);
  report(4, "closed-form cap consistency", worst_rel <= 1e-12 && constraints_ok, buf);
}

void criterion_5() {
  int recovered = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed * 7919);
    std::vector<double> x(10000);
    for (auto& v : x) v = weibull_sample({2.0, 1.5}, rng);
    const WeibullFit fit = fit_weibull_mle(x);
    const double ek = std::abs(fit.params.kappa - 2.0) / 2.0;
    const double eg = std::abs(fit.params.gamma - 1.5) / 1.5;
    worst = std::max({worst, ek, eg});
    if (ek <= 0.05 && eg <= 0.05) ++recovered;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/10 seeds, worst rel err = %.3f", recovered, worst);
  report(5, "MLE parameter recovery", recovered == 10, buf);
}

void criterion_6() {
  const WeibullParams p{2.0, 1.5};
  Rng rng(1618);
  int rejections = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(22);
    for (auto& v : x) v = weibull_sample(p, rng);
    if (ks_test(x, [&](double v) { return weibull_cdf(p, v); }).p_value < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / trials;
  char buf[96];
  std::snprintf(buf, sizeof buf, "rejection rate at 5%% level = %.3f (n=22)", rate);
  report(6, "KS calibration", rate >= 0.02 && rate <= 0.09, buf);
}

// Shared state between criteria 7-9: the full synthetic-fleet experiment.
struct FleetExperiment {
  HourlyPools pools;
  ExperimentResult result;
  ExperimentConfig cfg;
};

FleetExperiment run_fleet_experiment() {
  SynthFleetConfig synth;  // 200 EVs, 366 days, seed 7
  const auto records = generate_synthetic_fleet(synth);
  const auto tmp = std::filesystem::temp_directory_path() / "flexbid_acceptance_minutes.csv";
  {
    std::ofstream out(tmp);
    out << minute_csv_body(records);
  }
  const auto [samples, stats] = estimate_hourly(tmp);
  std::filesystem::remove(tmp);
  FleetExperiment fe;
  fe.pools = build_pools(samples);
  fe.cfg = ExperimentConfig{};  // 10 runs, 216 in-sample, eps 0.1, alpha eps/3, seed 7
  fe.result = run_experiment(fe.pools, fe.cfg);
  return fe;
}

void criterion_7(const FleetExperiment& fe) {
  const auto& s = fe.result.summary;
  double worst_analytical = 0.0;
  int analytical_not_worse = 0;
  for (std::size_t h = 0; h < s.hours.size(); ++h) {
    worst_analytical = std::max(worst_analytical, s.analytical[h].joint_rate_mean);
    if (s.analytical[h].joint_rate_mean <= s.scenario[h].joint_rate_mean) ++analytical_not_worse;
  }
  const bool bounded = worst_analytical <= 0.15;
  const bool majority = 2 * analytical_not_worse > static_cast<int>(s.hours.size());
  char buf[112];
  std::snprintf(buf, sizeof buf, "max hourly mean rate = %.3f; <= scenario on %d/%d hours",
                worst_analytical, analytical_not_worse, static_cast<int>(s.hours.size()));
  report(7, "analytical conservatism (10 runs)", bounded && majority, buf);
}

void criterion_8(const FleetExperiment& fe) {
  std::vector<std::pair<int, std::map<int, AnalyticalInputs>>> inputs;
  for (const auto& run : fe.result.runs) {
    std::map<int, AnalyticalInputs> by_hour;
    for (const auto& hour : run.hours) {
      by_hour[hour.hour] = analytical_inputs_from_fits(hour.fits, fe.cfg.eps);
    }
    inputs.emplace_back(run.run, std::move(by_hour));
  }
  const std::vector<double> grid = {0.1, 0.0333, 0.01, 0.005, 0.0005};
  const auto curves = sensitivity_sweep(inputs, grid, fe.cfg.eps);
  bool monotone = true;
  bool feasible_at_tightest = false;
  for (const auto& curve : curves) {
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      monotone = monotone &&
                 curve.points[i].total_bid_kw <= curve.points[i - 1].total_bid_kw + 1e-9;
    }
    for (const auto& [hour, ok] : curve.points.back().hour_feasible) {
      feasible_at_tightest = feasible_at_tightest || ok;
    }
  }
  char buf[112];
  std::snprintf(buf, sizeof buf, "monotone on %d runs; feasible hour at alpha=0.0005: %s",
                static_cast<int>(curves.size()), feasible_at_tightest ? "yes" : "no");
  report(8, "alpha-sensitivity monotonicity", monotone && feasible_at_tightest, buf);
}

void criterion_9(const FleetExperiment& fe) {
  // Same per-hour instances for both methods: run 0's fitted models and its
  // 216-scenario in-sample sets.
  std::vector<AnalyticalInputs> analytic_instances;
  std::vector<std::vector<Scenario>> scenario_instances;
  const auto& run0 = fe.result.runs.front();
  for (const auto& hour : run0.hours) {
    analytic_instances.push_back(analytical_inputs_from_fits(hour.fits, fe.cfg.eps));
    const auto& pool = fe.pools.at(hour.hour);
    const auto idx = split_indices(fe.cfg.seed, run0.run, hour.hour, pool.size(),
                                   static_cast<std::size_t>(fe.cfg.in_sample_size));
    std::vector<Scenario> in_sample;
    in_sample.reserve(idx.size());
    for (auto i : idx) in_sample.push_back(pool[i]);
    scenario_instances.push_back(std::move(in_sample));
  }
  using clock = std::chrono::steady_clock;
  double sink = 0.0;
  const int a_reps = 2000, s_reps = 10;
  const auto t0 = clock::now();
  for (int rep = 0; rep < a_reps; ++rep) {
    for (const auto& in : analytic_instances) {
      sink += analytical_bid(in, fe.cfg.resolved_alpha()).bid.b_up_kw;
    }
  }
  const auto t1 = clock::now();
  for (int rep = 0; rep < s_reps; ++rep) {
    for (const auto& sc : scenario_instances) sink += scenario_bid(sc, fe.cfg.eps).objective;
  }
  const auto t2 = clock::now();
  const double per_hour_a =
      std::chrono::duration<double, std::micro>(t1 - t0).count() / (a_reps * 24.0);
  const double per_hour_s =
      std::chrono::duration<double, std::micro>(t2 - t1).count() / (s_reps * 24.0);
  char buf[112];
  std::snprintf(buf, sizeof buf, "analytical %.2f us vs scenario %.2f us per hour%s",
                per_hour_a, per_hour_s, sink == -1.0 ? "!" : "");
  report(9, "analytical solve is faster", per_hour_a < per_hour_s, buf);
}

void criterion_10() {
  const double t = t_quantile(0.025, 9);
  std::vector<double> x;
  for (int i = 1; i <= 10; ++i) x.push_back(i);
  const auto ci = confidence_interval(x);
  const bool ok = std::abs(t - 2.2622) <= 1e-3 && std::abs(ci.lo - 3.334) <= 1e-3 &&
                  std::abs(ci.hi - 7.666) <= 1e-3;
  char buf[112];
  std::snprintf(buf, sizeof buf, "t=%.5f, CI=[%.4f, %.4f]", t, ci.lo, ci.hi);
  report(10, "t-quantile and confidence interval", ok, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite (flexbid)\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  const FleetExperiment fe = run_fleet_experiment();
  criterion_7(fe);
  criterion_8(fe);
  criterion_9(fe);
  criterion_10();
  if (g_failures == 0) {
    std::printf("all 10 criteria passed\n");
    return EXIT_SUCCESS;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return EXIT_FAILURE;
}
