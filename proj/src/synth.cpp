#include "flexbid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flexbid/errors.hpp"
#include "flexbid/rng.hpp"

namespace flexbid {

namespace {

constexpr std::uint64_t kTagSynthEv = 0x53594e5445560001ULL;

std::string ev_name(int index) {
  std::string digits = std::to_string(index);
  return "ev" + std::string(5 - std::min<std::size_t>(5, digits.size()), '0') + digits;
}

}  // namespace

void validate_config(const SynthFleetConfig& cfg) {
  std::string problems;
  auto complain = [&](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (cfg.n_evs < 0) complain("n_evs must be >= 0");
  if (cfg.n_days < 1) complain("n_days must be >= 1");
  if (cfg.arrival_spread_min < 0 || cfg.departure_spread_min < 0) {
    complain("spreads must be >= 0");
  }
  if (cfg.arrival_mean_min - cfg.arrival_spread_min < 0 ||
      cfg.arrival_mean_min + cfg.arrival_spread_min > 1439) {
    complain("arrival window must stay within one day (0..1439)");
  }
  if (cfg.departure_mean_min - cfg.departure_spread_min < 0) {
    complain("departure window must start at or after the following midnight");
  }
  if (cfg.departure_mean_min + cfg.departure_spread_min >=
      cfg.arrival_mean_min - cfg.arrival_spread_min) {
    complain("departure window must close before the next day's arrival window opens");
  }
  if (!(cfg.battery_min_kwh > 0.0) || cfg.battery_max_kwh < cfg.battery_min_kwh) {
    complain("battery range must satisfy 0 < min <= max");
  }
  if (cfg.charger_levels_kw.empty()) complain("at least one charger level required");
  for (double level : cfg.charger_levels_kw) {
    if (!(level > 0.0)) {
      complain("charger levels must be > 0");
      break;
    }
  }
  if (!(cfg.plug_in_prob >= 0.0) || !(cfg.plug_in_prob <= 1.0)) {
    complain("plug_in_prob must lie in [0,1]");
  }
  if (!(cfg.energy_frac_min > 0.0) || cfg.energy_frac_max < cfg.energy_frac_min ||
      cfg.energy_frac_max > 1.0) {
    complain("energy fraction range must satisfy 0 < min <= max <= 1");
  }
  if (!problems.empty()) throw UsageError("synthetic fleet config: " + problems);
}

std::vector<MinuteRecord> generate_synthetic_fleet(const SynthFleetConfig& cfg) {
  validate_config(cfg);
  const std::int64_t horizon = static_cast<std::int64_t>(cfg.n_days) * 1440;
  std::vector<MinuteRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.n_evs) *
                  static_cast<std::size_t>(cfg.n_days) * 3);

  for (int v = 0; v < cfg.n_evs; ++v) {
    Rng rng(derive_seed(cfg.seed, {kTagSynthEv, static_cast<std::uint64_t>(v)}));
    const std::string id = ev_name(v);
    const double battery = rng.uniform(cfg.battery_min_kwh, cfg.battery_max_kwh);
    const double charger = cfg.charger_levels_kw[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(cfg.charger_levels_kw.size()) - 1))];

    for (int day = 0; day < cfg.n_days; ++day) {
      const bool plugged = rng.uniform01() < cfg.plug_in_prob;
      if (!plugged) continue;
      const std::int64_t arrival =
          static_cast<std::int64_t>(day) * 1440 + cfg.arrival_mean_min +
          rng.uniform_int(-cfg.arrival_spread_min, cfg.arrival_spread_min);
      std::int64_t departure =
          static_cast<std::int64_t>(day + 1) * 1440 + cfg.departure_mean_min +
          rng.uniform_int(-cfg.departure_spread_min, cfg.departure_spread_min);
      departure = std::min(departure, horizon - 1);
      const double energy =
          battery * rng.uniform(cfg.energy_frac_min, cfg.energy_frac_max);
      // Whole-minute charging duration at constant charger power.
      const auto charge_minutes =
          std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                        std::ceil(energy * 60.0 / charger)));
      const std::int64_t charge_end = arrival + charge_minutes;

      records.push_back({id, arrival, charger, true});
      if (charge_end < departure) {
        records.push_back({id, charge_end, 0.0, true});  // full; idle while connected
      }
      records.push_back({id, departure, 0.0, false});
    }
  }
  return records;
}

}  // namespace flexbid
