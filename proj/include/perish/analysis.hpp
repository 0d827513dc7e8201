#pragma once

#include <vector>

#include "perish/effective_demand.hpp"
#include "perish/params.hpp"
#include "perish/policy.hpp"

namespace perish {

// Percentage cost deviation (L_h - L*) / L*. Requires L* > 0.
double cost_deviation(double l_h, double l_star);

struct PolicyIndices {
  double tau = 0.0;  // order-up-to level at the empty state
  double eta = 0.0;  // average order-amount slope over the recurrent region
};

// tau and eta measured on the x_{m-1}-axis slice with the other components
// zero, matching the order-amount plots. Throws if the slice endpoint is
// missing from the table.
PolicyIndices policy_indices(const PolicyTable& table);

enum class MAlphaMethod { Exact, Normal };

// Smallest lifetime at which the policy collapses to constant base-stock
// within tolerance alpha: F_{D^m}(F_D^{-1}(gamma*)) <= alpha. The exact
// method uses the m-fold distribution (Erlang / Poisson sum / convolution);
// the normal method uses the CLT approximation. Requires h > 0.
int min_lifetime(const CostParams& params, const DemandModel& model, double alpha,
                 MAlphaMethod method);

struct McMbCurves {
  std::vector<double> q;
  std::vector<double> mc;  // (theta+c) F_{D^m(x)}(q)
  std::vector<double> mb;  // (h+r-c) Fbar_D(q) - h - (theta+c) w_ex
};

McMbCurves mc_mb_curves(const CostParams& params, const EffectiveDemandContext& ctx,
                        const InventoryVector& x, double w_ex,
                        const std::vector<double>& q_grid);

struct PolicyBounds {
  double q_dagger = 0.0;       // q_h*(0), always finite
  double q_ddagger = 0.0;      // large-inventory limit, finite iff flagged
  bool ddagger_finite = false;
};

// Lower bound from the empty-state solve; upper bound from the marginal
// condition with the wastage term removed, infinite when h + (theta+c) w_ex
// never crosses zero.
PolicyBounds policy_bounds(const CostParams& params, const EffectiveDemandContext& ctx,
                           double w_ex, double tol_scale = 1e-6);

struct CbsLimitFlags {
  bool cdf_below_alpha = false;   // F_{D^m}(q_dagger) <= alpha
  bool gap_below_step = false;    // q_ddagger - q_dagger <= grid step
  bool spread_below_step = false; // recurrent levels within one step of q_c*
  double f_dm_at_dagger = 0.0;
  double gap = 0.0;
  double spread = 0.0;
};

CbsLimitFlags cbs_limit_flags(const PolicyTable& table, const EffectiveDemandContext& ctx,
                              const PolicyBounds& bounds, double q_c_star, double alpha);

}  // namespace perish
