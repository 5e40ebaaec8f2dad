#pragma once

#include <cstdint>
#include <vector>

#include "flexbid/ingest.hpp"

namespace flexbid {

// Overnight residential charging fleet. Each EV gets a fixed battery size
// and charger level; on each day it plugs in with probability plug_in_prob,
// arriving in the evening and departing the next morning, charging at the
// charger level until its energy need is met, then idling while connected.
// Times are uniform integers in [mean - spread, mean + spread] minutes.
struct SynthFleetConfig {
  int n_evs = 200;
  int n_days = 366;
  std::uint64_t seed = 7;
  int arrival_mean_min = 1260;     // 21:00, minutes into the day
  int arrival_spread_min = 120;
  int departure_mean_min = 420;    // 07:00 the following day
  int departure_spread_min = 90;
  double battery_min_kwh = 30.0;
  double battery_max_kwh = 80.0;
  std::vector<double> charger_levels_kw = {3.7, 7.4, 11.0};
  double plug_in_prob = 0.85;
  double energy_frac_min = 0.2;    // energy need as a fraction of battery size
  double energy_frac_max = 0.8;
};

// Throws UsageError describing every violated constraint.
void validate_config(const SynthFleetConfig& cfg);

// Deterministic for a fixed config. Emits records sorted by (ev_id, minute);
// events past the n_days*1440 horizon are clipped (the final departure lands
// on the horizon's last minute), so the dataset always spans whole days.
std::vector<MinuteRecord> generate_synthetic_fleet(const SynthFleetConfig& cfg);

}  // namespace flexbid
