#include "flexbid/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexbid/errors.hpp"

namespace flexbid {

double bid_cap(double r_eps, double kappa, double gamma, double alpha, double eps) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) throw UsageError("bid_cap: kappa, gamma must be > 0");
  if (!(eps > 0.0) || !(eps < 1.0)) throw UsageError("bid_cap: eps must lie in (0,1)");
  if (!(alpha > 0.0) || alpha > eps) {
    throw UsageError("bid_cap: alpha must lie in (0, eps]; the tail model only covers "
                     "probabilities at or below eps");
  }
  const double shortfall = std::pow(std::log(eps / alpha) / kappa, 1.0 / gamma);
  return r_eps - shortfall;
}

AnalyticalBid analytical_bid(const AnalyticalInputs& inputs, double alpha) {
  auto cap_of = [&](const FlexTailModel& m) {
    if (!m.has_fit) return 0.0;  // no tail model: no probabilistic guarantee
    return bid_cap(m.threshold, m.params.kappa, m.params.gamma, alpha, inputs.eps);
  };
  AnalyticalBid out;
  out.cap_up = cap_of(inputs.up);
  out.cap_down = cap_of(inputs.down);
  out.cap_e20 = cap_of(inputs.e20);
  const double a = out.cap_up;
  const double b = std::min(out.cap_down, out.cap_e20);
  if (a <= 0.0) {
    // The coupling 0.2*b_down + b_up <= A fails for any positive bid.
    out.bid = Bid{};
    out.feasible = false;
    return out;
  }
  // maximize b_up + b_down over 0.2*b_down + b_up <= a, b_down <= b, b >= 0.
  // The objective gains 0.8 per unit of b_down swapped against b_up, so push
  // b_down to its cap; b_down <= 5a keeps b_up nonnegative.
  const double b_down = std::max(0.0, std::min(b, 5.0 * a));
  const double b_up = std::max(0.0, a - 0.2 * b_down);
  out.bid = Bid{b_up, b_down};
  out.feasible = true;
  return out;
}

ScenarioBid scenario_bid(const std::vector<Scenario>& scenarios, double eps) {
  if (scenarios.empty()) throw DataError("scenario_bid: empty scenario set");
  if (!(eps > 0.0) || !(eps < 1.0)) throw UsageError("scenario_bid: eps must lie in (0,1)");
  const std::size_t n = scenarios.size();
  // Guard the floor against representation error (e.g. 0.1 * 370).
  const auto k = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * eps + 1e-9));
  if (k >= n) {
    throw UsageError("scenario_bid: violation budget >= sample count makes the "
                     "formulation unbounded");
  }

  std::vector<double> m(n);  // per-scenario cap on b_down
  for (std::size_t i = 0; i < n; ++i) m[i] = std::min(scenarios[i].r_down, scenarios[i].r_e20);

  // Candidate b_down levels: every scenario's m plus 0 (down market unused).
  std::vector<double> candidates(m);
  candidates.push_back(0.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // up-capacity order, reused for the greedy residual-budget removal.
  std::vector<std::size_t> by_up(n);
  std::iota(by_up.begin(), by_up.end(), std::size_t{0});
  std::stable_sort(by_up.begin(), by_up.end(), [&](std::size_t x, std::size_t y) {
    return scenarios[x].r_up < scenarios[y].r_up;
  });

  ScenarioBid best;
  best.objective = -1.0;
  for (double d : candidates) {
    // Scenarios whose down-cap cannot support b_down = d must be excluded.
    std::size_t forced = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i] < d) ++forced;
    }
    if (forced > k) continue;
    const std::size_t budget = k - forced;
    // Among the kept scenarios, spend the residual budget excluding the
    // smallest r_up values; the binding up-cap is the next smallest.
    double u = 0.0;
    std::size_t skipped = 0;
    bool found = false;
    std::vector<std::size_t> removed_up;
    for (std::size_t idx : by_up) {
      if (m[idx] < d) continue;  // already excluded via the down side
      if (skipped < budget) {
        removed_up.push_back(idx);
        ++skipped;
        continue;
      }
      u = scenarios[idx].r_up;
      found = true;
      break;
    }
    if (!found) continue;  // keeps nothing: cannot happen while k < n
    if (u < 0.0) continue;
    const double b_down = std::min(d, 5.0 * u);
    const double b_up = std::max(0.0, u - 0.2 * b_down);
    const double objective = b_up + b_down;
    // Prefer higher objective; on ties prefer the larger down bid.
    if (objective > best.objective + 1e-12 ||
        (objective > best.objective - 1e-12 && b_down > best.bid.b_down_kw + 1e-12)) {
      best.objective = objective;
      best.bid = Bid{b_up, b_down};
      best.violated.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (m[i] < d) best.violated.push_back(i);
      }
      for (std::size_t idx : removed_up) best.violated.push_back(idx);
      std::sort(best.violated.begin(), best.violated.end());
    }
  }
  if (best.objective < 0.0) best = ScenarioBid{};  // defensive; k < n guarantees a candidate
  best.feasible = best.objective > 0.0;
  return best;
}

int required_sample_size(double eps, double delta, int p) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw UsageError("required_sample_size: eps in (0,1)");
  if (!(delta > 0.0) || delta > 1.0) throw UsageError("required_sample_size: delta in (0,1]");
  if (p < 1) throw UsageError("required_sample_size: p must be >= 1");
  const double value = (2.0 / eps) * std::log(1.0 / delta) + 2.0 * p +
                       (2.0 * p / eps) * std::log(2.0 / eps);
  return static_cast<int>(std::ceil(value));
}

}  // namespace flexbid
