#include "perish/effective_demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "perish/grid.hpp"

namespace perish {

namespace {

double interp_on(const std::vector<double>& v, double step, double z) {
  if (z <= 0.0) return v.empty() ? 0.0 : v.front() * (z >= 0.0 ? 1.0 : 0.0);
  const double pos = z / step;
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

double EffectiveCdf::at(double z) const {
  if (z < 0.0) throw std::invalid_argument("effective-demand cdf requires z >= 0");
  if (discrete) {
    const auto idx = static_cast<std::size_t>(grid_floor_index(z, step));
    return idx >= values.size() ? values.back() : values[idx];
  }
  return interpolated(z);
}

double EffectiveCdf::interpolated(double z) const {
  if (z < 0.0) throw std::invalid_argument("effective-demand cdf requires z >= 0");
  return interp_on(values, step, z);
}

EffectiveDemandContext::EffectiveDemandContext(DemandModel model, int lifetime,
                                               double cap_value)
    : model_(std::move(model)), m_(lifetime), cap_value_(cap_value) {
  if (m_ < 1) throw std::invalid_argument("lifetime must be >= 1");
  if (!(cap_value_ > 0.0)) throw std::invalid_argument("cap must be positive");
  const double s = model_.step();
  n_ = static_cast<std::size_t>(grid_floor_index(cap_value_, s)) + 1;
  weights_ = model_.cell_pmf_centered(n_);

  auto base = std::make_shared<EffectiveCdf>();
  base->level = 1;
  base->base_prefix = 0.0;
  base->step = s;
  base->discrete = model_.discrete();
  base->values.resize(n_);
  for (std::size_t i = 0; i < n_; ++i)
    base->values[i] = model_.cdf(grid_value(static_cast<long long>(i), s));
  base->tail_mass = 1.0 - base->values.back();
  base_ = std::move(base);
}

std::shared_ptr<const EffectiveCdf> EffectiveDemandContext::curve(const InventoryVector& x,
                                                                  int level) const {
  if (level < 1 || level > m_)
    throw std::invalid_argument("effective-demand level must be in [1, m], got " +
                                std::to_string(level));
  if (level == 1) return base_;
  if (x.size() + 1 < static_cast<std::size_t>(level))
    throw std::invalid_argument("inventory vector too short for requested level");

  const double s = model_.step();
  std::vector<long long> prefix_idx(static_cast<std::size_t>(level - 1));
  for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(level); ++i)
    prefix_idx[i] = grid_index_checked(x[i], s, "inventory component");

  // Memoize levels below the lifetime (shared prefixes) and the all-zero
  // top-level curve; other top-level curves are built once per query.
  const bool cacheable =
      level < m_ || std::all_of(prefix_idx.begin(), prefix_idx.end(),
                                [](long long v) { return v == 0; });
  if (!cacheable) return compute(prefix_idx, level);

  Key key{level, prefix_idx};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto result = compute(prefix_idx, level);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = cache_.emplace(std::move(key), std::move(result));
  return it->second;
}

std::shared_ptr<const EffectiveCdf> EffectiveDemandContext::compute(
    const std::vector<long long>& prefix_idx, int level) const {
  const double s = model_.step();
  const bool disc = model_.discrete();

  // Recurse one level at a time; reuse cached sub-levels where possible.
  std::shared_ptr<const EffectiveCdf> cur = base_;
  if (level > 2) {
    std::vector<double> comps(prefix_idx.size() - 1);
    for (std::size_t i = 0; i + 1 < prefix_idx.size(); ++i)
      comps[i] = grid_value(prefix_idx[i], s);
    cur = curve(InventoryVector(comps, s), level - 1);
  }

  long long cutoff = 0;  // x^{level-1} in grid units
  for (long long v : prefix_idx) cutoff += v;

  auto next = std::make_shared<EffectiveCdf>();
  next->level = level;
  next->base_prefix = grid_value(cutoff, s);
  next->step = s;
  next->discrete = disc;
  next->values.assign(n_, 0.0);

  const auto cut = static_cast<std::size_t>(cutoff);
  const std::vector<double>& prev = cur->values;
  // F_{D^{i+1}}(z) = sum_{xi <= z - x^i} F_{D^i}(z - xi) w(xi). The closed
  // upper limit keeps the atom at xi = z - x^i (right-continuity); for
  // continuous kinds the boundary point itself carries no mass and stays 0.
  const std::size_t z_start = disc ? cut : cut + 1;
  for (std::size_t z = z_start; z < n_; ++z) {
    const std::size_t span = z - cut;
    double acc = 0.0;
    for (std::size_t xi = 0; xi <= span; ++xi) acc += prev[z - xi] * weights_[xi];
    next->values[z] = std::min(acc, 1.0);
  }
  next->tail_mass = 1.0 - next->values.back();
  return next;
}

double EffectiveDemandContext::cdf_at(const InventoryVector& x, int level, double q) const {
  if (q < 0.0) throw std::invalid_argument("effective-demand cdf requires q >= 0");
  return curve(x, level)->at(q);
}

double EffectiveDemandContext::demand_cdf_interp(double q) const {
  if (q < 0.0) throw std::invalid_argument("demand cdf requires q >= 0");
  if (!model_.discrete()) return model_.cdf(q);
  return interp_on(base_->values, model_.step(), q);
}

}  // namespace perish
