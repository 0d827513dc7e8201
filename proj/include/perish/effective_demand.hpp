#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "perish/demand.hpp"
#include "perish/inventory.hpp"

namespace perish {

// Grid-valued CDF of the i-period effective demand D^i(x^{i-1}): the total
// outflow through demand and wastage over periods 1..i (excluding period-i
// wastage) given the initial-inventory prefix x^{i-1}.
struct EffectiveCdf {
  int level = 1;
  double base_prefix = 0.0;  // x^{i-1}; the CDF is zero below this point
  double step = 1.0;
  bool discrete = true;
  std::vector<double> values;  // F at grid points 0, s, ..., cap
  double tail_mass = 0.0;      // 1 - F(cap), mass beyond the computed window

  // CDF semantics: right-continuous step lookup for discrete kinds, linear
  // interpolation for continuous kinds.
  double at(double z) const;

  // Piecewise-linear view used by the root solver for every kind.
  double interpolated(double z) const;
};

// Per-run convolution context. Builds effective-demand CDFs by the modified
// convolution recursion and memoizes levels shared across inventory vectors
// with a common prefix. Reads are lock-free once cached; insertion is
// serialized, so results are identical regardless of thread count.
class EffectiveDemandContext {
 public:
  // cap_value bounds the grid window [0, cap]; curve values within the window
  // are unaffected by the truncation (the recursion never looks past cap).
  EffectiveDemandContext(DemandModel model, int lifetime, double cap_value);

  const DemandModel& model() const { return model_; }
  int lifetime() const { return m_; }
  double cap() const { return cap_value_; }
  double step() const { return model_.step(); }

  // CDF curve of D^level(x^{level-1}); level in [1, lifetime]. Uses the first
  // level-1 components of x. Throws on a level out of range or off-grid x.
  std::shared_ptr<const EffectiveCdf> curve(const InventoryVector& x, int level) const;

  // Point evaluation with CDF semantics (exact lookup for discrete kinds,
  // linear interpolation for continuous kinds). Throws on q < 0.
  double cdf_at(const InventoryVector& x, int level, double q) const;

  // One-period demand CDF on the solver's piecewise-linear view.
  double demand_cdf_interp(double q) const;

 private:
  using Key = std::pair<int, std::vector<long long>>;
  std::shared_ptr<const EffectiveCdf> compute(const std::vector<long long>& prefix_idx,
                                              int level) const;

  DemandModel model_;
  int m_;
  double cap_value_;
  std::size_t n_;                // grid points in the window
  std::vector<double> weights_;  // convolution weights (centered cell masses)
  std::shared_ptr<const EffectiveCdf> base_;  // level 1: F_D exactly on the grid
  mutable std::mutex mu_;
  mutable std::map<Key, std::shared_ptr<const EffectiveCdf>> cache_;
};

}  // namespace perish
