#pragma once

#include <vector>

#include "perish/demand.hpp"
#include "perish/params.hpp"

namespace perish {

struct DpConfig {
  double epsilon = -1.0;    // span stopping rule; default 1e-6 * mean demand
  double bound = -1.0;      // state/action grid bound; default from demand quantiles
  long long max_iterations = 50000;
  double damping = 0.9;     // aperiodicity weight on the transition kernel
};

// Average-cost optimal policy for the zero-lead-time system on the
// discretized state grid, found by relative value iteration.
struct DpSolution {
  int lifetime = 1;
  double step = 1.0;
  long long points_per_dim = 1;   // grid points per state dimension (m-1 dims)
  std::vector<double> order_up_to;  // greedy order-up-to level per flat state
  double avg_cost = 0.0;
  long long iterations = 0;
  double final_span = 0.0;
  std::vector<double> span_history;

  // Order-up-to level for a (possibly off-grid) state; components snap down.
  double policy_level(const std::vector<double>& state) const;
  std::size_t flatten_state(const std::vector<long long>& idx) const;
};

DpSolution dp_solve(const CostParams& params, const DemandModel& model,
                    const DpConfig& config = {});

// Figure-style slice: order amount versus the newest-inventory component
// x_{m-1}, with the other components fixed (default 0).
std::vector<std::pair<double, double>> dp_order_amounts(const DpSolution& solution,
                                                        double fixed_other = 0.0);

}  // namespace perish
