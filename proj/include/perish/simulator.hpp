#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "perish/demand.hpp"
#include "perish/dp.hpp"
#include "perish/params.hpp"
#include "perish/policy.hpp"

namespace perish {

// Ordering rule driving a simulation: a constant base-stock level, a solved
// policy table, or a dynamic-programming policy grid.
using OrderPolicy = std::variant<double, const PolicyTable*, const DpSolution*>;

struct SimConfig {
  long long periods = 1'000'000;
  long long burn_in = 10'000;
  std::uint64_t seed = 1;
  long long sample_stride = 100;     // thinning for stationary state snapshots
  std::size_t max_samples = 10'000;
  bool collect_samples = true;
};

// Stationary estimates from one replication. Standard errors come from batch
// means over the post-burn-in horizon.
struct SimStats {
  double n_h = 0.0;  // expected units held at end of period (incl. outdating)
  double n_s = 0.0;  // expected lost sales per period
  double n_w = 0.0;  // expected units outdated per period
  double avg_cost = 0.0;
  double se_h = 0.0, se_s = 0.0, se_w = 0.0, se_cost = 0.0;
  long long periods = 0, burn_in = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> state_sample;  // pre-order inventory vectors
  std::vector<double> waste_batches;              // per-batch wastage means
};

// Simulates the periodic-review lost-sales FIFO system. Per period: receive
// the arriving order, place a new order up to the policy level, serve demand
// oldest-first, charge lost sales, charge wastage on the cohort exceeding its
// lifetime, and charge holding on all end-of-period on-hand units including
// the outdating ones. Statistics accumulate after the burn-in.
SimStats simulate(const CostParams& params, const DemandModel& model,
                  const OrderPolicy& policy, const SimConfig& config);

struct CurvePoint {
  double q_c = 0.0;
  double n_h = 0.0, n_s = 0.0, n_w = 0.0;
  double se_h = 0.0, se_s = 0.0, se_w = 0.0;
};

// Evaluates the stationary curves under constant base-stock levels with
// common random numbers: every level sees the same demand stream, so finite
// differences across levels are low-variance.
std::vector<CurvePoint> wastage_curve(const CostParams& params, const DemandModel& model,
                                      const std::vector<double>& q_grid,
                                      const SimConfig& config);

}  // namespace perish
