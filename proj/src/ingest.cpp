#include "flexbid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexbid/csv.hpp"
#include "flexbid/errors.hpp"

namespace flexbid {

EvSeries densify(const std::string& ev_id, const std::vector<MinuteRecord>& records,
                 std::int64_t horizon) {
  if (horizon < 0) throw UsageError("densify: negative horizon");
  EvSeries series;
  series.ev_id = ev_id;
  series.power_kw.assign(static_cast<std::size_t>(horizon), 0.0);
  series.connected.assign(static_cast<std::size_t>(horizon), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.minute < 0) throw DataError("densify: negative minute for " + ev_id);
    if (i > 0 && records[i - 1].minute >= rec.minute) {
      throw DataError("densify: records for " + ev_id + " not strictly increasing at minute " +
                      std::to_string(rec.minute));
    }
    const std::int64_t from = std::min(rec.minute, horizon);
    const std::int64_t to = (i + 1 < records.size()) ? std::min(records[i + 1].minute, horizon)
                                                     : horizon;
    for (std::int64_t t = from; t < to; ++t) {
      series.power_kw[static_cast<std::size_t>(t)] = rec.power_kw;
      series.connected[static_cast<std::size_t>(t)] = rec.connected ? 1 : 0;
    }
  }
  return series;
}

std::pair<std::vector<ChargingSession>, EvProfile> reconstruct_profiles(const EvSeries& series) {
  const std::size_t n = series.power_kw.size();
  EvProfile profile;
  profile.ev_id = series.ev_id;
  for (std::size_t t = 0; t < n; ++t) {
    profile.charger_max_kw = std::max(profile.charger_max_kw, series.power_kw[t]);
  }

  // Maximal connected runs; runs that deliver energy become sessions.
  std::vector<ChargingSession> sessions;
  std::size_t t = 0;
  while (t < n) {
    if (!series.connected[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    double energy = 0.0;
    while (end < n && series.connected[end]) {
      energy += series.power_kw[end] / 60.0;
      ++end;
    }
    if (energy > 0.0) {
      ChargingSession s;
      s.ev_id = series.ev_id;
      s.start_minute = static_cast<std::int64_t>(t);
      s.end_minute = static_cast<std::int64_t>(end);
      s.session_energy_kwh = energy;
      sessions.push_back(s);
    }
    t = end;
  }

  profile.usable = !sessions.empty();
  for (const auto& s : sessions) {
    profile.battery_capacity_kwh = std::max(profile.battery_capacity_kwh, s.session_energy_kwh);
  }

  // SoC: full everywhere except inside a session, where the remaining
  // session energy is the distance from full (100% at session end).
  profile.soc_kwh.assign(n, profile.battery_capacity_kwh);
  for (const auto& s : sessions) {
    double delivered = 0.0;
    for (std::int64_t i = s.start_minute; i < s.end_minute; ++i) {
      delivered += series.power_kw[static_cast<std::size_t>(i)] / 60.0;
      const double soc =
          profile.battery_capacity_kwh - (s.session_energy_kwh - delivered);
      if (soc < -1e-9) {
        throw DataError("reconstruct_profiles: negative SoC for " + series.ev_id +
                        " at minute " + std::to_string(i));
      }
      profile.soc_kwh[static_cast<std::size_t>(i)] = std::max(soc, 0.0);
    }
  }
  return {std::move(sessions), std::move(profile)};
}

FlexSeries compute_flexibility(const EvSeries& series, const EvProfile& profile) {
  const std::size_t n = series.power_kw.size();
  FlexSeries flex;
  flex.up.assign(n, 0.0);
  flex.down.assign(n, 0.0);
  flex.e20.assign(n, 0.0);
  if (n == 0) return flex;

  // next_disconnect[t]: first index >= t with connected == 0 (n if none).
  std::vector<std::size_t> next_disconnect(n + 1, n);
  for (std::size_t t = n; t-- > 0;) {
    next_disconnect[t] = series.connected[t] ? next_disconnect[t + 1] : t;
  }

  const double pmax = profile.charger_max_kw;
  for (std::size_t t = 0; t < n; ++t) {
    const double k = series.connected[t] ? 1.0 : 0.0;
    const double p = series.power_kw[t];
    flex.up[t] = p * k;
    flex.down[t] = (pmax - p) * k;
    const std::size_t window_end = t + static_cast<std::size_t>(kLookaheadMinutes);
    const bool window_ok = window_end < n && next_disconnect[t] > window_end;
    if (window_ok) {
      const double headroom = profile.battery_capacity_kwh - profile.soc_kwh[t];
      flex.e20[t] = std::min(pmax * k, 3.0 * headroom);
    }
  }
  return flex;
}

std::tuple<double, double, double> minute_flexibility(const EvProfile& profile,
                                                      const EvSeries& series, std::int64_t t) {
  const auto n = static_cast<std::int64_t>(series.power_kw.size());
  if (t < 0 || t >= n) throw UsageError("minute_flexibility: minute out of range");
  const auto ti = static_cast<std::size_t>(t);
  const double k = series.connected[ti] ? 1.0 : 0.0;
  const double p = series.power_kw[ti];
  const double r_up = p * k;
  const double r_down = (profile.charger_max_kw - p) * k;
  double product = 1.0;
  if (t + kLookaheadMinutes >= n) {
    product = 0.0;  // lookahead runs past the dataset
  } else {
    for (std::int64_t i = t; i <= t + kLookaheadMinutes; ++i) {
      if (!series.connected[static_cast<std::size_t>(i)]) {
        product = 0.0;
        break;
      }
    }
  }
  const double r_e = (profile.battery_capacity_kwh - profile.soc_kwh[ti]) * product;
  const double r_e20 = std::min(profile.charger_max_kw * k, 3.0 * r_e);
  return {r_up, r_down, r_e20};
}

FleetAccumulator::FleetAccumulator(std::int64_t horizon)
    : horizon_(horizon),
      up_(static_cast<std::size_t>(horizon), 0.0),
      down_(static_cast<std::size_t>(horizon), 0.0),
      e20_(static_cast<std::size_t>(horizon), 0.0) {
  if (horizon < 0) throw UsageError("FleetAccumulator: negative horizon");
}

void FleetAccumulator::add(const FlexSeries& flex) {
  if (flex.up.size() != up_.size()) {
    throw UsageError("FleetAccumulator: series length does not match the horizon");
  }
  for (std::size_t t = 0; t < up_.size(); ++t) {
    up_[t] += flex.up[t];
    down_[t] += flex.down[t];
    e20_[t] += flex.e20[t];
  }
}

HourlyResult aggregate_and_hourly_min(const FleetAccumulator& fleet) {
  HourlyResult result;
  const std::int64_t horizon = fleet.horizon();
  const std::int64_t n_hours = horizon / 60;
  result.dropped_trailing_minutes = horizon - n_hours * 60;
  result.samples.reserve(static_cast<std::size_t>(n_hours));
  for (std::int64_t h = 0; h < n_hours; ++h) {
    HourlyFlexSample sample;
    sample.day = h / 24;
    sample.hour = static_cast<int>(h % 24);
    double up = std::numeric_limits<double>::infinity();
    double down = up;
    double e20 = up;
    for (std::int64_t t = h * 60; t < (h + 1) * 60; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      up = std::min(up, fleet.up()[ti]);
      down = std::min(down, fleet.down()[ti]);
      e20 = std::min(e20, fleet.e20()[ti]);
    }
    sample.r_up_kw = up;
    sample.r_down_kw = down;
    sample.r_e20_kw = e20;
    result.samples.push_back(sample);
  }
  return result;
}

std::vector<MinuteRecord> read_minute_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_ev = table.col("ev_id");
  const std::size_t c_min = table.col("minute");
  const std::size_t c_pow = table.col("power_kw");
  const std::size_t c_con = table.col("connected");
  std::vector<MinuteRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    MinuteRecord rec;
    rec.ev_id = row[c_ev];
    rec.minute = parse_int(row[c_min]);
    rec.power_kw = parse_double(row[c_pow]);
    const std::int64_t conn = parse_int(row[c_con]);
    if (conn != 0 && conn != 1) {
      throw DataError("minute csv: connected must be 0 or 1, got " + row[c_con]);
    }
    rec.connected = conn == 1;
    if (rec.power_kw < 0.0) {
      throw DataError("minute csv: negative power for " + rec.ev_id + " at minute " +
                      std::to_string(rec.minute));
    }
    if (!rec.connected && rec.power_kw != 0.0) {
      throw DataError("minute csv: disconnected EV " + rec.ev_id + " has nonzero power at minute " +
                      std::to_string(rec.minute));
    }
    if (rec.minute < 0) {
      throw DataError("minute csv: negative minute for " + rec.ev_id);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string minute_csv_body(const std::vector<MinuteRecord>& records) {
  std::string out = "ev_id,minute,power_kw,connected\n";
  for (const auto& rec : records) {
    out += rec.ev_id;
    out += ',';
    out += std::to_string(rec.minute);
    out += ',';
    out += format_double(rec.power_kw);
    out += ',';
    out += rec.connected ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::pair<std::vector<HourlyFlexSample>, IngestStats> estimate_hourly(
    const std::filesystem::path& minute_csv) {
  const auto records = read_minute_csv(minute_csv);
  if (records.empty()) throw DataError("estimate: no records in '" + minute_csv.string() + "'");

  // Group per EV; std::map gives a deterministic EV order.
  std::map<std::string, std::vector<MinuteRecord>> by_ev;
  std::int64_t max_minute = 0;
  for (const auto& rec : records) {
    max_minute = std::max(max_minute, rec.minute);
    by_ev[rec.ev_id].push_back(rec);
  }
  const std::int64_t horizon = max_minute + 1;

  IngestStats stats;
  stats.n_records = records.size();
  stats.n_evs = by_ev.size();
  stats.horizon = horizon;

  FleetAccumulator fleet(horizon);
  for (auto& [ev_id, ev_records] : by_ev) {
    std::sort(ev_records.begin(), ev_records.end(),
              [](const MinuteRecord& a, const MinuteRecord& b) { return a.minute < b.minute; });
    const EvSeries series = densify(ev_id, ev_records, horizon);
    auto [sessions, profile] = reconstruct_profiles(series);
    fleet.add(compute_flexibility(series, profile));
  }

  HourlyResult hourly = aggregate_and_hourly_min(fleet);
  stats.dropped_trailing_minutes = hourly.dropped_trailing_minutes;
  return {std::move(hourly.samples), stats};
}

std::vector<HourlyFlexSample> read_hourly_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_day = table.col("day");
  const std::size_t c_hour = table.col("hour");
  const std::size_t c_up = table.col("r_up_kw");
  const std::size_t c_down = table.col("r_down_kw");
  const std::size_t c_e20 = table.col("r_e20_kw");
  std::vector<HourlyFlexSample> samples;
  samples.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    HourlyFlexSample s;
    s.day = parse_int(row[c_day]);
    s.hour = static_cast<int>(parse_int(row[c_hour]));
    if (s.hour < 0 || s.hour > 23) {
      throw DataError("hourly csv: hour out of range: " + row[c_hour]);
    }
    s.r_up_kw = parse_double(row[c_up]);
    s.r_down_kw = parse_double(row[c_down]);
    s.r_e20_kw = parse_double(row[c_e20]);
    if (s.r_up_kw < 0.0 || s.r_down_kw < 0.0 || s.r_e20_kw < 0.0) {
      throw DataError("hourly csv: negative flexibility on day " + row[c_day] + " hour " +
                      row[c_hour]);
    }
    samples.push_back(s);
  }
  return samples;
}

std::string hourly_csv_body(const std::vector<HourlyFlexSample>& samples) {
  std::string out = "day,hour,r_up_kw,r_down_kw,r_e20_kw\n";
  for (const auto& s : samples) {
    out += std::to_string(s.day);
    out += ',';
    out += std::to_string(s.hour);
    out += ',';
    out += format_double(s.r_up_kw);
    out += ',';
    out += format_double(s.r_down_kw);
    out += ',';
    out += format_double(s.r_e20_kw);
    out += '\n';
  }
  return out;
}

}  // namespace flexbid
