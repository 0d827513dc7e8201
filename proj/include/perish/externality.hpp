#pragma once

#include <cstddef>

#include "perish/effective_demand.hpp"
#include "perish/params.hpp"
#include "perish/simulator.hpp"

namespace perish {

// Marginal external effect of raising the base-stock level: the derivative of
// the stationary wastage curve minus the stationary mean of the effective-
// demand CDF at q_c. Always in (-1, 0] up to estimation noise.
struct ExternalityEstimate {
  double q_c = 0.0;
  double w_ex = 0.0;
  double v_ex = 0.0;       // (theta + c) * w_ex
  double std_error = 0.0;
  double wprime = 0.0;     // finite-difference slope of the wastage curve
  double se_wprime = 0.0;
  double cdf_term = 0.0;   // E_x F_{D^m(x)}(q_c) over sampled stationary states
  double se_cdf = 0.0;
  double delta = 0.0;      // finite-difference step actually used
  bool one_sided = false;  // q_c at the grid boundary
  long long periods = 0;
  std::size_t samples = 0;
};

// Estimates w_ex(q_c) from a common-random-number pair of base-stock
// simulations at q_c +/- delta plus the analytic effective-demand CDF
// averaged over states sampled under the base-stock policy at q_c.
// delta <= 0 selects the default: one grid step for discrete demand, 0.5 for
// continuous. Lifetime-one systems have no externality and return exact zero.
ExternalityEstimate estimate_w_ex(const CostParams& params, const DemandModel& model,
                                  const EffectiveDemandContext& ctx, double q_c,
                                  const SimConfig& config, double delta = -1.0);

}  // namespace perish
