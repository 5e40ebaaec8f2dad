#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace flexbid {

// One EV's state change: `power_kw`/`connected` hold from `minute` until the
// EV's next record (zero-order hold). Before an EV's first record it is
// disconnected; after its last record the state holds to the end of the
// dataset horizon.
struct MinuteRecord {
  std::string ev_id;
  std::int64_t minute = 0;
  double power_kw = 0.0;
  bool connected = false;
};

// Dense per-minute state for one EV over [0, horizon).
struct EvSeries {
  std::string ev_id;
  std::vector<double> power_kw;
  std::vector<std::uint8_t> connected;
};

// Maximal connected interval with positive delivered energy,
// [start_minute, end_minute) half-open.
struct ChargingSession {
  std::string ev_id;
  std::int64_t start_minute = 0;
  std::int64_t end_minute = 0;
  double session_energy_kwh = 0.0;
};

// Battery model recovered from the observed sessions under the
// full-at-session-end assumption. `usable` is false when the EV never
// charges (no session): such an EV contributes zero flexibility.
struct EvProfile {
  std::string ev_id;
  double battery_capacity_kwh = 0.0;
  double charger_max_kw = 0.0;
  std::vector<double> soc_kwh;
  bool usable = false;
};

// Realized hourly flexibility of the whole fleet: the minute-wise minimum
// over the hour of the fleet-aggregate (r_up, r_down, r_e20).
struct HourlyFlexSample {
  std::int64_t day = 0;
  int hour = 0;
  double r_up_kw = 0.0;
  double r_down_kw = 0.0;
  double r_e20_kw = 0.0;
};

// Number of minutes an r_e20 guarantee must look ahead (a 20-minute
// sustain window; the connectivity product spans minutes t..t+20 inclusive).
inline constexpr std::int64_t kLookaheadMinutes = 20;

// Expands one EV's records (sorted, strictly increasing minutes) to a dense
// minute series over [0, horizon) by zero-order hold.
EvSeries densify(const std::string& ev_id, const std::vector<MinuteRecord>& records,
                 std::int64_t horizon);

// Recovers charging sessions and the battery profile from a dense series:
// capacity = largest session energy, charger limit = largest observed power,
// SoC inside a session = capacity - (session energy - energy delivered so
// far, inclusive of the current minute); full outside sessions.
std::pair<std::vector<ChargingSession>, EvProfile> reconstruct_profiles(const EvSeries& series);

struct FlexSeries {
  std::vector<double> up;
  std::vector<double> down;
  std::vector<double> e20;
};

// Per-minute flexibility for one EV over the whole series:
//   up   = P * k
//   down = (P_max - P) * k
//   e20  = min(P_max * k, 3 * headroom * [connected through t+20])
// where headroom is in kWh and the factor 3 converts a 20-minute energy
// budget to sustained kW. Minutes with an incomplete lookahead window (the
// dataset's last 20 minutes) get e20 = 0.
FlexSeries compute_flexibility(const EvSeries& series, const EvProfile& profile);

// Same quantities for a single minute, computed directly from the profile
// and series (reference implementation; must agree with compute_flexibility).
std::tuple<double, double, double> minute_flexibility(const EvProfile& profile,
                                                      const EvSeries& series, std::int64_t t);

// Accumulates per-EV flexibility series into fleet-level minute sums.
class FleetAccumulator {
 public:
  explicit FleetAccumulator(std::int64_t horizon);
  void add(const FlexSeries& flex);
  std::int64_t horizon() const { return horizon_; }
  const std::vector<double>& up() const { return up_; }
  const std::vector<double>& down() const { return down_; }
  const std::vector<double>& e20() const { return e20_; }

 private:
  std::int64_t horizon_;
  std::vector<double> up_, down_, e20_;
};

struct HourlyResult {
  std::vector<HourlyFlexSample> samples;
  std::int64_t dropped_trailing_minutes = 0;  // horizon not divisible by 60
};

// Minute-wise fleet minimum per complete hour; a trailing partial hour is
// dropped (a padded minimum would be biased low).
HourlyResult aggregate_and_hourly_min(const FleetAccumulator& fleet);

struct IngestStats {
  std::size_t n_records = 0;
  std::size_t n_evs = 0;
  std::int64_t horizon = 0;
  std::int64_t dropped_trailing_minutes = 0;
};

// Full file-based pipeline: minute-record CSV -> hourly flexibility samples.
// Groups records by EV, validates them, and streams one EV at a time through
// densify/reconstruct/flexibility into the fleet accumulator.
std::pair<std::vector<HourlyFlexSample>, IngestStats> estimate_hourly(
    const std::filesystem::path& minute_csv);

// CSV row parsing/formatting for the `ev_id,minute,power_kw,connected` schema.
std::vector<MinuteRecord> read_minute_csv(const std::filesystem::path& path);
std::string minute_csv_body(const std::vector<MinuteRecord>& records);

// `day,hour,r_up_kw,r_down_kw,r_e20_kw` schema.
std::vector<HourlyFlexSample> read_hourly_csv(const std::filesystem::path& path);
std::string hourly_csv_body(const std::vector<HourlyFlexSample>& samples);

}  // namespace flexbid
