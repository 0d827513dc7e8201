#pragma once

#include <string>
#include <vector>

#include "perish/effective_demand.hpp"
#include "perish/params.hpp"

namespace perish {

// Order amount x_m = [q - x]^+ for order-up-to level q and inventory position
// x (on-hand plus pipeline).
inline double order_amount(double order_up_to, double inventory_position) {
  const double a = order_up_to - inventory_position;
  return a > 0.0 ? a : 0.0;
}

struct RootResult {
  double root = 0.0;      // continuous root of the marginal condition
  double level = 0.0;     // grid-feasible order-up-to level (policy output)
  double residual = 0.0;  // marginal-condition value at the root
  int iterations = 0;
};

// Unique root of
//   g_x(q) = (theta+c) F_{D^m(x)}(q) - (h+r-c) Fbar_D(q) + h + (theta+c) w_ex
// by bisection with upper-bracket expansion. Requires w_ex in (-1, 0].
// Residual tolerance is tol_scale * (theta + h + r). Discrete kinds solve on
// the piecewise-linear CDF view and report the smallest grid level at which
// the marginal condition is nonnegative.
RootResult solve_marginal(const CostParams& params, const EffectiveDemandContext& ctx,
                          const InventoryVector& x, double w_ex, double tol_scale = 1e-6);

// Positive lead time variant: holding and shortage are driven by the
// (l+1)-period effective demand at the prefix x^l. Identical to
// solve_marginal when lead_time == 0.
RootResult solve_marginal_leadtime(const CostParams& params,
                                   const EffectiveDemandContext& ctx,
                                   const InventoryVector& x, double w_ex,
                                   double tol_scale = 1e-6);

struct PolicyEntry {
  double root = 0.0;
  double level = 0.0;
  double residual = 0.0;   // marginal-condition value at the root
  bool recurrent = false;  // total initial inventory <= tau
};

// Order-up-to levels for every grid inventory vector with components in
// [0, bound]. Lookup snaps full-precision states down to the grid and fails
// loudly on states outside the table.
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(std::size_t dims, long long points_per_dim, double step);

  std::size_t dims() const { return dims_; }
  long long points_per_dim() const { return per_dim_; }
  double step() const { return step_; }
  double component_bound() const;

  PolicyEntry& at_indices(const std::vector<long long>& idx);
  const PolicyEntry& at_indices(const std::vector<long long>& idx) const;

  // Order-up-to level for a (possibly off-grid) state; components snap down.
  double order_up_to(const std::vector<double>& state) const;
  const PolicyEntry& entry_for_state(const std::vector<double>& state) const;

  double tau() const { return tau_; }
  void set_tau(double tau) { tau_ = tau; }

  std::size_t entry_count() const { return entries_.size(); }
  const std::vector<PolicyEntry>& entries() const { return entries_; }
  std::vector<PolicyEntry>& mutable_entries() { return entries_; }
  std::vector<double> state_for_entry(std::size_t flat_index) const;

  // Metadata carried into serialized tables.
  std::string demand_id;
  double w_ex = 0.0;
  double q_c_star = 0.0;
  double solver_tol = 0.0;

 private:
  std::size_t flatten(const std::vector<long long>& idx) const;
  std::size_t dims_ = 0;
  long long per_dim_ = 1;
  double step_ = 1.0;
  double tau_ = 0.0;
  std::vector<PolicyEntry> entries_;
};

// Solves the marginal condition for every grid vector with components in
// [0, component_bound]; records tau = q_h*(0) and flags recurrent entries.
PolicyTable build_policy_table(const CostParams& params, const EffectiveDemandContext& ctx,
                               double w_ex, double component_bound, double q_c_star,
                               double tol_scale = 1e-6);

}  // namespace perish
