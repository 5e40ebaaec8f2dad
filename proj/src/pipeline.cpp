#include "flexbid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "flexbid/csv.hpp"
#include "flexbid/errors.hpp"
#include "flexbid/stats.hpp"
#include "flexbid/svg.hpp"

namespace flexbid {

using nlohmann::json;

double PipelineConfig::resolved_alpha() const {
  return alpha < 0.0 ? eps / 3.0 : alpha;
}

int PipelineConfig::resolved_in_sample_size() const {
  return in_sample_size < 0 ? required_sample_size(eps, 0.01, 2) : in_sample_size;
}

ExperimentConfig PipelineConfig::experiment_config() const {
  ExperimentConfig ec;
  ec.n_runs = n_runs;
  ec.in_sample_size = resolved_in_sample_size();
  ec.eps = eps;
  ec.alpha = resolved_alpha();
  ec.seed = seed;
  ec.grid = grid;
  return ec;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double cfg_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const DataError&) {
    throw UsageError("config: bad numeric value for '" + key + "': " + value);
  }
}

std::int64_t cfg_int(const std::string& key, const std::string& value) {
  try {
    return parse_int(value);
  } catch (const DataError&) {
    throw UsageError("config: bad integer value for '" + key + "': " + value);
  }
}

std::vector<double> cfg_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? value.substr(start) : value.substr(start, comma - start));
    if (!item.empty()) out.push_back(cfg_double(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("config: empty list for '" + key + "'");
  return out;
}

std::string to_hex(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << v;
  return ss.str();
}

}  // namespace

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config: line " + std::to_string(line_no) + " is not key=value: " + line);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "eps") {
      cfg.eps = cfg_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = cfg_double(key, value);
    } else if (key == "n_runs") {
      cfg.n_runs = static_cast<int>(cfg_int(key, value));
    } else if (key == "in_sample_size") {
      cfg.in_sample_size = static_cast<int>(cfg_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(cfg_int(key, value));
      cfg.synth.seed = cfg.seed;
    } else if (key == "gamma_lo") {
      cfg.grid.lo = cfg_double(key, value);
    } else if (key == "gamma_hi") {
      cfg.grid.hi = cfg_double(key, value);
    } else if (key == "gamma_steps") {
      cfg.grid.steps = static_cast<int>(cfg_int(key, value));
    } else if (key == "n_evs") {
      cfg.synth.n_evs = static_cast<int>(cfg_int(key, value));
    } else if (key == "n_days") {
      cfg.synth.n_days = static_cast<int>(cfg_int(key, value));
    } else if (key == "arrival_mean_min") {
      cfg.synth.arrival_mean_min = static_cast<int>(cfg_int(key, value));
    } else if (key == "arrival_spread_min") {
      cfg.synth.arrival_spread_min = static_cast<int>(cfg_int(key, value));
    } else if (key == "departure_mean_min") {
      cfg.synth.departure_mean_min = static_cast<int>(cfg_int(key, value));
    } else if (key == "departure_spread_min") {
      cfg.synth.departure_spread_min = static_cast<int>(cfg_int(key, value));
    } else if (key == "battery_min_kwh") {
      cfg.synth.battery_min_kwh = cfg_double(key, value);
    } else if (key == "battery_max_kwh") {
      cfg.synth.battery_max_kwh = cfg_double(key, value);
    } else if (key == "charger_levels_kw") {
      cfg.synth.charger_levels_kw = cfg_double_list(key, value);
    } else if (key == "plug_in_prob") {
      cfg.synth.plug_in_prob = cfg_double(key, value);
    } else if (key == "energy_frac_min") {
      cfg.synth.energy_frac_min = cfg_double(key, value);
    } else if (key == "energy_frac_max") {
      cfg.synth.energy_frac_max = cfg_double(key, value);
    } else if (key == "cv_draw_size") {
      cfg.cv_draw_size = static_cast<int>(cfg_int(key, value));
    } else if (key == "cv_reps") {
      cfg.cv_reps = static_cast<int>(cfg_int(key, value));
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (!(cfg.eps > 0.0) || !(cfg.eps < 1.0)) throw UsageError("eps must lie in (0,1)");
  if (cfg.alpha >= 0.0 && (!(cfg.alpha > 0.0) || cfg.alpha > cfg.eps)) {
    throw UsageError("alpha must lie in (0, eps]");
  }
  if (cfg.n_runs < 1) throw UsageError("n_runs must be >= 1");
  if (cfg.in_sample_size >= 0 && cfg.in_sample_size < 2) {
    throw UsageError("in_sample_size must be >= 2");
  }
  if (!(cfg.grid.lo > 0.0) || !(cfg.grid.hi > cfg.grid.lo) || cfg.grid.steps < 2) {
    throw UsageError("gamma grid must satisfy 0 < lo < hi and steps >= 2");
  }
  if (cfg.cv_reps < 2) throw UsageError("cv_reps must be >= 2");
  validate_config(cfg.synth);
}

namespace {

std::vector<std::pair<std::string, std::string>> base_manifest(const PipelineConfig& cfg,
                                                               const std::string& subcommand) {
  return {
      {"tool", kToolVersion},
      {"subcommand", subcommand},
      {"seed", std::to_string(cfg.seed)},
      {"eps", format_double(cfg.eps)},
      {"alpha", format_double(cfg.resolved_alpha())},
      {"n_runs", std::to_string(cfg.n_runs)},
      {"in_sample_size", std::to_string(cfg.resolved_in_sample_size())},
  };
}

void add_input_digest(std::vector<std::pair<std::string, std::string>>& entries,
                      const std::string& name, const std::filesystem::path& path) {
  entries.emplace_back("input_" + name, path.string());
  entries.emplace_back("input_" + name + "_fnv1a64", to_hex(fnv1a64_file(path)));
}

json manifest_json(const std::vector<std::pair<std::string, std::string>>& entries) {
  json j = json::object();
  for (const auto& [k, v] : entries) j[k] = v;
  return j;
}

std::string flex_name(Flex f) { return kFlexNames[static_cast<std::size_t>(f)]; }

std::string bids_csv_body(const std::vector<BidRow>& rows) {
  std::string out = "run,hour,method,alpha,b_up_kw,b_down_kw,feasible\n";
  for (const auto& r : rows) {
    out += std::to_string(r.run) + ',' + std::to_string(r.hour) + ',' + r.method + ',' +
           format_double(r.alpha) + ',' + format_double(r.b_up_kw) + ',' +
           format_double(r.b_down_kw) + ',' + (r.feasible ? "1" : "0") + '\n';
  }
  return out;
}

std::string fits_csv_body(const std::vector<FitRow>& rows) {
  std::string out = "run,hour,flexibility,threshold_kw,kappa,gamma,n_tail,nll\n";
  for (const auto& r : rows) {
    out += std::to_string(r.run) + ',' + std::to_string(r.hour) + ',' + flex_name(r.flex) + ',' +
           format_double(r.threshold_kw) + ',' + format_double(r.kappa) + ',' +
           format_double(r.gamma) + ',' + std::to_string(r.n_tail) + ',' + format_double(r.nll) +
           '\n';
  }
  return out;
}

struct ValidationRow {
  int run = 0;
  int hour = 0;
  std::string method;
  ValidationReport report;
};

std::string validation_csv_body(const std::vector<ValidationRow>& rows) {
  std::string out =
      "run,hour,method,n_oos,violations_up,violations_down,violations_e20,violations_joint,"
      "joint_rate\n";
  for (const auto& r : rows) {
    out += std::to_string(r.run) + ',' + std::to_string(r.hour) + ',' + r.method + ',' +
           std::to_string(r.report.n_oos) + ',' + std::to_string(r.report.violations_up) + ',' +
           std::to_string(r.report.violations_down) + ',' +
           std::to_string(r.report.violations_e20) + ',' +
           std::to_string(r.report.violations_joint) + ',' + format_double(r.report.joint_rate) +
           '\n';
  }
  return out;
}

// Aggregates KS results over runs into the report layout.
std::string ks_csv_body(const std::vector<RunOutcome>& runs) {
  std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> agg;
  for (const auto& run : runs) {
    for (const auto& hour : run.hours) {
      for (const auto& ks : hour.ks) {
        if (!ks.ok) continue;
        auto& entry = agg[{hour.hour, static_cast<int>(ks.flex)}];
        entry.first.push_back(ks.result.d_n);
        entry.second.push_back(ks.result.p_value);
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::string out = "hour,flexibility,d_n_mean,d_n_sd,p_mean,p_sd\n";
  for (const auto& [key, values] : agg) {
    const auto& [d, p] = values;
    const double d_sd = d.size() >= 2 ? sample_sd(d) : nan;
    const double p_sd = p.size() >= 2 ? sample_sd(p) : nan;
    out += std::to_string(key.first) + ',' + flex_name(static_cast<Flex>(key.second)) + ',' +
           format_double(mean(d)) + ',' + format_double(d_sd) + ',' + format_double(mean(p)) +
           ',' + format_double(p_sd) + '\n';
  }
  return out;
}

std::uint64_t splits_digest(const std::vector<RunOutcome>& runs) {
  std::string all;
  for (const auto& run : runs) {
    for (const auto& hour : run.hours) {
      all += to_hex(hour.split_digest);
      all += ';';
    }
  }
  return fnv1a64(all);
}

}  // namespace

std::vector<BidRow> read_bids_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_run = table.col("run");
  const std::size_t c_hour = table.col("hour");
  const std::size_t c_method = table.col("method");
  const std::size_t c_alpha = table.col("alpha");
  const std::size_t c_up = table.col("b_up_kw");
  const std::size_t c_down = table.col("b_down_kw");
  const std::size_t c_feasible = table.col("feasible");
  std::vector<BidRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    BidRow r;
    r.run = static_cast<int>(parse_int(row[c_run]));
    r.hour = static_cast<int>(parse_int(row[c_hour]));
    r.method = row[c_method];
    if (r.method != "analytical" && r.method != "scenario") {
      throw DataError("bids csv: unknown method '" + r.method + "'");
    }
    r.alpha = parse_double(row[c_alpha]);
    r.b_up_kw = parse_double(row[c_up]);
    r.b_down_kw = parse_double(row[c_down]);
    r.feasible = parse_int(row[c_feasible]) != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FitRow> read_fits_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_run = table.col("run");
  const std::size_t c_hour = table.col("hour");
  const std::size_t c_flex = table.col("flexibility");
  const std::size_t c_thr = table.col("threshold_kw");
  const std::size_t c_kappa = table.col("kappa");
  const std::size_t c_gamma = table.col("gamma");
  const std::size_t c_ntail = table.col("n_tail");
  const std::size_t c_nll = table.col("nll");
  std::vector<FitRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FitRow r;
    r.run = static_cast<int>(parse_int(row[c_run]));
    r.hour = static_cast<int>(parse_int(row[c_hour]));
    r.flex = flex_from_name(row[c_flex]);
    r.threshold_kw = parse_double(row[c_thr]);
    r.kappa = parse_double(row[c_kappa]);
    r.gamma = parse_double(row[c_gamma]);
    r.n_tail = static_cast<int>(parse_int(row[c_ntail]));
    r.nll = parse_double(row[c_nll]);
    rows.push_back(r);
  }
  return rows;
}

std::map<DayHour, PricePoint> read_prices_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_day = table.col("day");
  const std::size_t c_hour = table.col("hour");
  const std::size_t c_up = table.col("pi_up_eur_per_kw");
  const std::size_t c_down = table.col("pi_down_eur_per_kw");
  std::map<DayHour, PricePoint> prices;
  for (const auto& row : table.rows) {
    const std::int64_t day = parse_int(row[c_day]);
    const int hour = static_cast<int>(parse_int(row[c_hour]));
    PricePoint p;
    p.pi_up = parse_double(row[c_up]);
    p.pi_down = parse_double(row[c_down]);
    if (p.pi_up < 0.0 || p.pi_down < 0.0) {
      throw DataError("prices csv: negative price on day " + row[c_day] + " hour " + row[c_hour]);
    }
    if (!prices.emplace(DayHour{day, hour}, p).second) {
      throw DataError("prices csv: duplicate (day " + row[c_day] + ", hour " + row[c_hour] + ")");
    }
  }
  return prices;
}

void cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_csv) {
  validate_pipeline_config(cfg);
  SynthFleetConfig synth = cfg.synth;
  synth.seed = cfg.seed;
  const auto records = generate_synthetic_fleet(synth);
  auto entries = base_manifest(cfg, "synth");
  entries.emplace_back("n_evs", std::to_string(synth.n_evs));
  entries.emplace_back("n_days", std::to_string(synth.n_days));
  entries.emplace_back("n_records", std::to_string(records.size()));
  write_file_atomic(out_csv, manifest_comment(entries) + minute_csv_body(records));
}

void cmd_estimate(const PipelineConfig& cfg, const std::filesystem::path& minute_csv,
                  const std::filesystem::path& hourly_csv) {
  validate_pipeline_config(cfg);
  auto [samples, stats] = estimate_hourly(minute_csv);
  auto entries = base_manifest(cfg, "estimate");
  add_input_digest(entries, "minutes", minute_csv);
  entries.emplace_back("n_records", std::to_string(stats.n_records));
  entries.emplace_back("n_evs", std::to_string(stats.n_evs));
  entries.emplace_back("horizon_minutes", std::to_string(stats.horizon));
  entries.emplace_back("dropped_trailing_minutes",
                       std::to_string(stats.dropped_trailing_minutes));
  write_file_atomic(hourly_csv, manifest_comment(entries) + hourly_csv_body(samples));
}

void cmd_bid(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
             const std::string& method, const std::filesystem::path& bids_csv,
             const std::filesystem::path& fits_csv, const std::filesystem::path& ks_csv) {
  validate_pipeline_config(cfg);
  if (method != "analytical" && method != "scenario") {
    throw UsageError("bid: method must be 'analytical' or 'scenario'");
  }
  const auto samples = read_hourly_csv(hourly_csv);
  const HourlyPools pools = build_pools(samples);
  const ExperimentResult result = run_experiment(pools, cfg.experiment_config());

  std::vector<BidRow> bid_rows;
  std::vector<FitRow> fit_rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& run : result.runs) {
    for (const auto& hour : run.hours) {
      BidRow row;
      row.run = run.run;
      row.hour = hour.hour;
      row.method = method;
      if (method == "analytical") {
        row.alpha = cfg.resolved_alpha();
        row.b_up_kw = hour.analytical.bid.b_up_kw;
        row.b_down_kw = hour.analytical.bid.b_down_kw;
        row.feasible = hour.analytical.feasible;
      } else {
        row.alpha = cfg.eps;  // the scenario budget level; no Bonferroni split
        row.b_up_kw = hour.scenario.bid.b_up_kw;
        row.b_down_kw = hour.scenario.bid.b_down_kw;
        row.feasible = hour.scenario.feasible;
      }
      bid_rows.push_back(std::move(row));
      for (const auto& fit : hour.fits) {
        FitRow fr;
        fr.run = run.run;
        fr.hour = fit.hour;
        fr.flex = fit.flex;
        fr.threshold_kw = fit.threshold_kw;
        fr.kappa = fit.ok ? fit.params.kappa : nan;
        fr.gamma = fit.ok ? fit.params.gamma : nan;
        fr.n_tail = fit.n_tail;
        fr.nll = fit.ok ? fit.nll : nan;
        fit_rows.push_back(fr);
      }
    }
  }

  auto entries = base_manifest(cfg, "bid");
  add_input_digest(entries, "hourly", hourly_csv);
  entries.emplace_back("method", method);
  entries.emplace_back("splits_fnv1a64", to_hex(splits_digest(result.runs)));
  write_file_atomic(bids_csv, manifest_comment(entries) + bids_csv_body(bid_rows));
  if (method == "analytical") {
    write_file_atomic(fits_csv, manifest_comment(entries) + fits_csv_body(fit_rows));
    write_file_atomic(ks_csv, manifest_comment(entries) + ks_csv_body(result.runs));
  }
}

namespace {

// Recomputes the out-of-sample set for one bid row and counts violations.
ValidationReport validate_row(const PipelineConfig& cfg, const HourlyPools& pools,
                              const BidRow& row) {
  const auto it = pools.find(row.hour);
  if (it == pools.end()) {
    throw DataError("validate: hour " + std::to_string(row.hour) +
                    " from the bids file has no samples in the hourly file");
  }
  const auto& pool = it->second;
  const auto in_size = static_cast<std::size_t>(cfg.resolved_in_sample_size());
  if (pool.size() <= in_size) {
    throw DataError("validate: hour " + std::to_string(row.hour) +
                    " pool does not exceed the in-sample size");
  }
  const auto idx = split_indices(cfg.seed, row.run, row.hour, pool.size(), in_size);
  std::vector<Scenario> oos;
  oos.reserve(pool.size() - idx.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (next < idx.size() && idx[next] == i) {
      ++next;
    } else {
      oos.push_back(pool[i]);
    }
  }
  return count_violations(Bid{row.b_up_kw, row.b_down_kw}, oos);
}

}  // namespace

void cmd_validate(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
                  const std::filesystem::path& bids_csv, const std::filesystem::path& out_csv,
                  const std::optional<std::filesystem::path>& out_json) {
  validate_pipeline_config(cfg);
  const auto samples = read_hourly_csv(hourly_csv);
  const HourlyPools pools = build_pools(samples);
  const auto bid_rows = read_bids_csv(bids_csv);
  if (bid_rows.empty()) throw DataError("validate: empty bids file");

  std::vector<ValidationRow> rows;
  rows.reserve(bid_rows.size());
  for (const auto& bid : bid_rows) {
    ValidationRow row;
    row.run = bid.run;
    row.hour = bid.hour;
    row.method = bid.method;
    row.report = validate_row(cfg, pools, bid);
    rows.push_back(std::move(row));
  }

  auto entries = base_manifest(cfg, "validate");
  add_input_digest(entries, "hourly", hourly_csv);
  add_input_digest(entries, "bids", bids_csv);
  write_file_atomic(out_csv, manifest_comment(entries) + validation_csv_body(rows));

  if (out_json) {
    json doc;
    doc["_manifest"] = manifest_json(entries);
    doc["reports"] = json::array();
    for (const auto& row : rows) {
      doc["reports"].push_back({{"run", row.run},
                                {"hour", row.hour},
                                {"method", row.method},
                                {"n_oos", row.report.n_oos},
                                {"violations_up", row.report.violations_up},
                                {"violations_down", row.report.violations_down},
                                {"violations_e20", row.report.violations_e20},
                                {"violations_joint", row.report.violations_joint},
                                {"joint_rate", row.report.joint_rate}});
    }
    write_file_atomic(*out_json, doc.dump(2) + "\n");
  }
}

namespace {

// Rebuilds per-run analytical inputs from a fits table.
std::vector<std::pair<int, std::map<int, AnalyticalInputs>>> inputs_from_fit_rows(
    const std::vector<FitRow>& rows, double eps) {
  std::map<int, std::map<int, AnalyticalInputs>> by_run;
  for (const auto& row : rows) {
    AnalyticalInputs& inputs = by_run[row.run][row.hour];
    inputs.eps = eps;
    FlexTailModel model;
    model.threshold = row.threshold_kw;
    model.params = WeibullParams{row.kappa, row.gamma};
    model.has_fit = std::isfinite(row.kappa) && std::isfinite(row.gamma) && row.n_tail >= 2;
    switch (row.flex) {
      case Flex::up: inputs.up = model; break;
      case Flex::down: inputs.down = model; break;
      case Flex::e20: inputs.e20 = model; break;
    }
  }
  std::vector<std::pair<int, std::map<int, AnalyticalInputs>>> out;
  out.reserve(by_run.size());
  for (auto& [run, by_hour] : by_run) out.emplace_back(run, std::move(by_hour));
  return out;
}

std::string sweep_csv_body(const std::vector<SweepCurve>& curves) {
  std::string out = "run,alpha,total_bid_kw,down_fraction,n_feasible_hours\n";
  for (const auto& curve : curves) {
    for (const auto& point : curve.points) {
      std::size_t feasible = 0;
      for (const auto& [hour, ok] : point.hour_feasible) {
        (void)hour;
        feasible += ok ? 1 : 0;
      }
      out += std::to_string(curve.run) + ',' + format_double(point.alpha) + ',' +
             format_double(point.total_bid_kw) + ',' + format_double(point.down_fraction) + ',' +
             std::to_string(feasible) + '\n';
    }
  }
  return out;
}

json sweep_json_doc(const std::vector<SweepCurve>& curves, double eps) {
  json doc;
  doc["eps"] = eps;
  doc["curves"] = json::array();
  for (const auto& curve : curves) {
    json jc;
    jc["run"] = curve.run;
    jc["points"] = json::array();
    for (const auto& point : curve.points) {
      json jp;
      jp["alpha"] = point.alpha;
      jp["total_bid_kw"] = point.total_bid_kw;
      jp["down_fraction"] = point.down_fraction;
      jp["hours"] = json::array();
      for (const auto& [hour, ok] : point.hour_feasible) {
        jp["hours"].push_back({{"hour", hour}, {"feasible", ok}});
      }
      jc["points"].push_back(std::move(jp));
    }
    doc["curves"].push_back(std::move(jc));
  }
  return doc;
}

}  // namespace

void cmd_sweep(const PipelineConfig& cfg, const std::filesystem::path& fits_csv,
               const std::vector<double>& alpha_grid, const std::filesystem::path& out_csv,
               const std::optional<std::filesystem::path>& out_json) {
  validate_pipeline_config(cfg);
  const auto fit_rows = read_fits_csv(fits_csv);
  if (fit_rows.empty()) throw DataError("sweep: empty fits file");
  const auto inputs = inputs_from_fit_rows(fit_rows, cfg.eps);
  const auto curves = sensitivity_sweep(inputs, alpha_grid, cfg.eps);

  auto entries = base_manifest(cfg, "sweep");
  add_input_digest(entries, "fits", fits_csv);
  std::string grid_text;
  for (double a : alpha_grid) {
    if (!grid_text.empty()) grid_text += ",";
    grid_text += format_double(a);
  }
  entries.emplace_back("alpha_grid", grid_text);
  write_file_atomic(out_csv, manifest_comment(entries) + sweep_csv_body(curves));
  if (out_json) {
    json doc = sweep_json_doc(curves, cfg.eps);
    doc["_manifest"] = manifest_json(entries);
    write_file_atomic(*out_json, doc.dump(2) + "\n");
  }
}

namespace {

struct MethodAggregate {
  std::vector<double> b_up, b_down, rates;
};

json stats_json(const MethodHourStats& s) {
  return {{"b_up_mean", s.b_up_mean},       {"b_up_sd", s.b_up_sd},
          {"b_down_mean", s.b_down_mean},   {"b_down_sd", s.b_down_sd},
          {"joint_rate_mean", s.joint_rate_mean}, {"joint_rate_sd", s.joint_rate_sd}};
}

MethodHourStats aggregate_stats(const MethodAggregate& agg) {
  MethodHourStats s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.b_up_mean = mean(agg.b_up);
  s.b_down_mean = mean(agg.b_down);
  s.joint_rate_mean = mean(agg.rates);
  const bool have_sd = agg.b_up.size() >= 2;
  s.b_up_sd = have_sd ? sample_sd(agg.b_up) : nan;
  s.b_down_sd = have_sd ? sample_sd(agg.b_down) : nan;
  s.joint_rate_sd = have_sd ? sample_sd(agg.rates) : nan;
  return s;
}

std::string summary_csv_body(const std::map<int, std::map<std::string, MethodHourStats>>& table,
                             int n_runs) {
  std::string out =
      "hour,method,b_up_mean,b_up_sd,b_down_mean,b_down_sd,joint_rate_mean,joint_rate_sd,"
      "n_runs\n";
  for (const auto& [hour, methods] : table) {
    for (const auto& [method, s] : methods) {
      out += std::to_string(hour) + ',' + method + ',' + format_double(s.b_up_mean) + ',' +
             format_double(s.b_up_sd) + ',' + format_double(s.b_down_mean) + ',' +
             format_double(s.b_down_sd) + ',' + format_double(s.joint_rate_mean) + ',' +
             format_double(s.joint_rate_sd) + ',' + std::to_string(n_runs) + '\n';
    }
  }
  return out;
}

std::string cv_csv_body(const std::vector<CvRecord>& records) {
  std::string out = "hour,flexibility,mean_kw,sd_kw,cv\n";
  for (const auto& r : records) {
    out += std::to_string(r.hour) + ',' + flex_name(r.flex) + ',' + format_double(r.mean) + ',' +
           format_double(r.sd) + ',' + format_double(r.cv) + '\n';
  }
  return out;
}

}  // namespace

void cmd_report(const PipelineConfig& cfg, const std::filesystem::path& hourly_csv,
                const std::vector<std::filesystem::path>& bids_csvs,
                const std::filesystem::path& fits_csv,
                const std::optional<std::filesystem::path>& prices_csv,
                const std::filesystem::path& out_dir) {
  validate_pipeline_config(cfg);
  if (bids_csvs.empty()) throw UsageError("report: at least one bids file required");
  const auto samples = read_hourly_csv(hourly_csv);
  const HourlyPools pools = build_pools(samples);
  std::vector<BidRow> bid_rows;
  for (const auto& path : bids_csvs) {
    const auto rows = read_bids_csv(path);
    bid_rows.insert(bid_rows.end(), rows.begin(), rows.end());
  }
  if (bid_rows.empty()) throw DataError("report: empty bids file");
  const auto fit_rows = read_fits_csv(fits_csv);

  std::filesystem::create_directories(out_dir);

  // Per (hour, method) aggregation across runs, with OOS rates recomputed
  // from the deterministic splits.
  std::map<int, std::map<std::string, MethodAggregate>> agg;
  std::set<int> runs_seen;
  for (const auto& row : bid_rows) {
    MethodAggregate& a = agg[row.hour][row.method];
    a.b_up.push_back(row.b_up_kw);
    a.b_down.push_back(row.b_down_kw);
    a.rates.push_back(validate_row(cfg, pools, row).joint_rate);
    runs_seen.insert(row.run);
  }
  std::map<int, std::map<std::string, MethodHourStats>> table;
  for (const auto& [hour, methods] : agg) {
    for (const auto& [method, a] : methods) {
      table[hour][method] = aggregate_stats(a);
    }
  }

  auto entries = base_manifest(cfg, "report");
  add_input_digest(entries, "hourly", hourly_csv);
  for (std::size_t i = 0; i < bids_csvs.size(); ++i) {
    const std::string key = bids_csvs.size() == 1 ? "bids" : "bids_" + std::to_string(i + 1);
    add_input_digest(entries, key, bids_csvs[i]);
  }
  add_input_digest(entries, "fits", fits_csv);
  const std::string comment = manifest_comment(entries);

  // --- run summary (CSV + JSON) -------------------------------------------
  const int n_runs_seen = static_cast<int>(runs_seen.size());
  write_file_atomic(out_dir / "run_summary.csv",
                    comment + summary_csv_body(table, n_runs_seen));

  json summary;
  summary["_manifest"] = manifest_json(entries);
  summary["n_runs"] = n_runs_seen;
  summary["eps"] = cfg.eps;
  summary["alpha"] = cfg.resolved_alpha();
  summary["hours"] = json::array();
  for (const auto& [hour, methods] : table) {
    json jh;
    jh["hour"] = hour;
    for (const auto& [method, s] : methods) jh[method] = stats_json(s);
    summary["hours"].push_back(std::move(jh));
  }

  // --- revenue (optional) ---------------------------------------------------
  if (prices_csv) {
    const auto prices = read_prices_csv(*prices_csv);
    json jrev = json::object();
    for (const std::string method : {"analytical", "scenario"}) {
      bool have = false;
      std::map<DayHour, Bid> grid;
      for (const auto& [key, price] : prices) {
        (void)price;
        const auto hour_it = table.find(key.second);
        if (hour_it == table.end()) continue;
        const auto m_it = hour_it->second.find(method);
        if (m_it == hour_it->second.end()) continue;
        grid[key] = Bid{m_it->second.b_up_mean, m_it->second.b_down_mean};
        have = true;
      }
      if (have) jrev[method] = revenue(grid, prices);
    }
    summary["revenue_eur"] = std::move(jrev);
  }
  write_file_atomic(out_dir / "run_summary.json", summary.dump(2) + "\n");

  // --- quantile stability report -------------------------------------------
  std::size_t min_pool = std::numeric_limits<std::size_t>::max();
  for (const auto& [hour, pool] : pools) {
    (void)hour;
    min_pool = std::min(min_pool, pool.size());
  }
  std::size_t draw = cfg.cv_draw_size < 0 ? static_cast<std::size_t>(cfg.resolved_in_sample_size())
                                          : static_cast<std::size_t>(cfg.cv_draw_size);
  draw = std::min(draw, min_pool);
  const auto cv_records = quantile_cv(pools, draw, cfg.cv_reps, cfg.eps, cfg.seed);
  write_file_atomic(out_dir / "cv_report.csv", comment + cv_csv_body(cv_records));
  {
    json doc;
    doc["_manifest"] = manifest_json(entries);
    doc["draw_size"] = draw;
    doc["n_reps"] = cfg.cv_reps;
    doc["records"] = json::array();
    for (const auto& r : cv_records) {
      doc["records"].push_back({{"hour", r.hour},
                                {"flexibility", flex_name(r.flex)},
                                {"mean_kw", r.mean},
                                {"sd_kw", r.sd},
                                {"cv", r.cv},
                                {"defined", r.ok}});
    }
    write_file_atomic(out_dir / "cv_report.json", doc.dump(2) + "\n");
  }

  // --- plots ----------------------------------------------------------------
  std::string manifest_text;
  for (const auto& [k, v] : entries) manifest_text += k + ": " + v + "\n";

  std::vector<BarGroup> bars;
  std::vector<RateGroup> rates;
  for (const auto& [hour, methods] : table) {
    BarGroup b;
    RateGroup r;
    b.hour = hour;
    r.hour = hour;
    if (auto it = methods.find("analytical"); it != methods.end()) {
      b.a_up = it->second.b_up_mean;
      b.a_down = it->second.b_down_mean;
      b.has_analytical = true;
      r.analytical = it->second.joint_rate_mean;
      r.has_analytical = true;
    }
    if (auto it = methods.find("scenario"); it != methods.end()) {
      b.s_up = it->second.b_up_mean;
      b.s_down = it->second.b_down_mean;
      b.has_scenario = true;
      r.scenario = it->second.joint_rate_mean;
      r.has_scenario = true;
    }
    bars.push_back(b);
    rates.push_back(r);
  }
  write_file_atomic(out_dir / "bids_per_hour.svg", render_bid_bars(bars, manifest_text));
  write_file_atomic(out_dir / "violation_rates.svg",
                    render_rate_bars(rates, cfg.eps, manifest_text));

  // Sensitivity: recompute the alpha sweep from the stored fits; the grid is
  // expressed relative to eps so it stays valid for any configured level.
  const std::vector<double> alpha_grid = {cfg.eps, cfg.eps / 3.0, cfg.eps / 10.0, cfg.eps / 20.0,
                                          cfg.eps / 200.0};
  std::vector<SensitivityPoint> sens_points;
  if (!fit_rows.empty()) {
    const auto inputs = inputs_from_fit_rows(fit_rows, cfg.eps);
    const auto curves = sensitivity_sweep(inputs, alpha_grid, cfg.eps);
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
      std::vector<double> totals;
      for (const auto& curve : curves) totals.push_back(curve.points[i].total_bid_kw);
      SensitivityPoint p;
      p.alpha = alpha_grid[i];
      p.mean_total = mean(totals);
      if (totals.size() >= 2) {
        const auto ci = confidence_interval(totals, 0.95);
        p.ci_lo = ci.lo;
        p.ci_hi = ci.hi;
      } else {
        p.ci_lo = p.ci_hi = p.mean_total;
      }
      sens_points.push_back(p);
    }
  }
  write_file_atomic(out_dir / "sensitivity.svg", render_sensitivity(sens_points, manifest_text));

  // Tail-fit overlay for a representative fitted hour: the richest tail of
  // the lowest-numbered run, recomputed from the deterministic split.
  const FitRow* pick = nullptr;
  for (const auto& row : fit_rows) {
    if (!std::isfinite(row.kappa) || row.n_tail < 2) continue;
    if (pick == nullptr || row.run < pick->run ||
        (row.run == pick->run && row.n_tail > pick->n_tail)) {
      pick = &row;
    }
  }
  std::vector<double> tail;
  WeibullParams params{1.0, 1.0};
  std::string label = "no tail fit available";
  if (pick != nullptr) {
    const auto& pool = pools.at(pick->hour);
    const auto idx = split_indices(cfg.seed, pick->run, pick->hour, pool.size(),
                                   static_cast<std::size_t>(cfg.resolved_in_sample_size()));
    std::vector<double> values;
    values.reserve(idx.size());
    for (std::size_t i : idx) {
      const Scenario& s = pool[i];
      switch (pick->flex) {
        case Flex::up: values.push_back(s.r_up); break;
        case Flex::down: values.push_back(s.r_down); break;
        case Flex::e20: values.push_back(s.r_e20); break;
      }
    }
    tail = extract_tail(values, pick->threshold_kw);
    params = WeibullParams{pick->kappa, pick->gamma};
    label = "hour " + std::to_string(pick->hour) + ", " + flex_name(pick->flex) +
            " flexibility, run " + std::to_string(pick->run);
  }
  write_file_atomic(out_dir / "tail_fit_cdf.svg",
                    render_cdf_overlay(tail, params, label, manifest_text));
}

}  // namespace flexbid
