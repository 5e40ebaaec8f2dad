#pragma once

#include <cstddef>
#include <vector>

#include "flexbid/weibull.hpp"

namespace flexbid {

// Hourly reserve capacity bid in kW. The market coupling rules enforced
// throughout are: 0.2*b_down + b_up <= (up availability), b_down <= (down
// availability), b_down <= (20-minute energy availability), b >= 0.
struct Bid {
  double b_up_kw = 0.0;
  double b_down_kw = 0.0;
};

// One flexibility direction's tail model: the empirical eps-quantile
// threshold plus the Weibull fitted to the shortfall below it. has_fit=false
// marks hours where no tail fit was possible; the solver then treats the
// availability cap for that direction as 0 (conservative fallback).
struct FlexTailModel {
  double threshold = 0.0;
  WeibullParams params;
  bool has_fit = false;
};

struct AnalyticalInputs {
  FlexTailModel up;
  FlexTailModel down;
  FlexTailModel e20;
  double eps = 0.1;
};

struct AnalyticalBid {
  Bid bid;
  bool feasible = false;
  double cap_up = 0.0;    // A: probabilistic cap on 0.2*b_down + b_up
  double cap_down = 0.0;  // cap on b_down from the down direction
  double cap_e20 = 0.0;   // cap on b_down from the 20-minute energy rule
};

// Probabilistic availability cap: the bid level b such that the fitted tail
// model puts probability alpha on availability falling below b,
//   b = r_eps - ((1/kappa) * log(eps/alpha))^(1/gamma).
// Requires 0 < alpha <= eps (the tail model only covers the lowest eps mass).
double bid_cap(double r_eps, double kappa, double gamma, double alpha, double eps);

// Closed-form optimum of: maximize b_up + b_down subject to
// 0.2*b_down + b_up <= A, b_down <= B, b >= 0, where A = cap(up) and
// B = min(cap(down), cap(e20)), each constraint holding with individual
// probability >= 1 - alpha under the fitted tails. A <= 0 means even a zero
// down-bid cannot be supported: the hour is flagged infeasible with bid (0,0).
AnalyticalBid analytical_bid(const AnalyticalInputs& inputs, double alpha);

// One joint realization of (up, down, 20-minute energy) availability in kW.
struct Scenario {
  double r_up = 0.0;
  double r_down = 0.0;
  double r_e20 = 0.0;
};

struct ScenarioBid {
  Bid bid;
  double objective = 0.0;           // b_up + b_down at the optimum
  bool feasible = false;            // nonzero bid found
  std::vector<std::size_t> violated;  // scenario indices excluded from the constraints
};

// Exact optimum of the sample-based formulation: pick at most
// floor(n * eps) scenarios to exclude and maximize b_up + b_down subject to
// the coupling constraints on every remaining scenario. Solved by
// enumerating candidate b_down levels d in {min(r_down, r_e20)} union {0}:
// scenarios with min(r_down, r_e20) < d are forced out, any residual budget
// removes the smallest remaining r_up values, and the 2-variable LP that
// remains is solved in closed form. O(n^2 log n); objective provably equals
// the brute-force maximum over all admissible exclusion sets.
ScenarioBid scenario_bid(const std::vector<Scenario>& scenarios, double eps);

// Smallest integer n with n >= (2/eps)*log(1/delta) + 2p + (2p/eps)*log(2/eps):
// the sample-count guarantee for the scenario approach with p decision
// variables, confidence 1-delta, violation level eps.
int required_sample_size(double eps, double delta, int p);

}  // namespace flexbid
