#include "perish/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace perish {

namespace {

double policy_level(const OrderPolicy& policy, const std::vector<double>& state) {
  if (std::holds_alternative<double>(policy)) return std::get<double>(policy);
  if (std::holds_alternative<const PolicyTable*>(policy))
    return std::get<const PolicyTable*>(policy)->order_up_to(state);
  return std::get<const DpSolution*>(policy)->policy_level(state);
}

struct BatchAccumulator {
  long long batch_len = 0;
  long long in_batch = 0;
  double batch_sum = 0.0;
  std::vector<double> batch_means;
  long double total = 0.0L;
  long long count = 0;

  void add(double v) {
    total += v;
    ++count;
    batch_sum += v;
    if (++in_batch == batch_len) {
      batch_means.push_back(batch_sum / static_cast<double>(batch_len));
      batch_sum = 0.0;
      in_batch = 0;
    }
  }
  double mean() const {
    return count ? static_cast<double>(total / static_cast<long double>(count)) : 0.0;
  }
  double std_error() const {
    const std::size_t b = batch_means.size();
    if (b < 2) return 0.0;
    double m = 0.0;
    for (double v : batch_means) m += v;
    m /= static_cast<double>(b);
    double var = 0.0;
    for (double v : batch_means) var += (v - m) * (v - m);
    var /= static_cast<double>(b - 1);
    return std::sqrt(var / static_cast<double>(b));
  }
};

}  // namespace

SimStats simulate(const CostParams& params, const DemandModel& model,
                  const OrderPolicy& policy, const SimConfig& config) {
  params.validate();
  if (config.periods <= config.burn_in || config.burn_in < 0)
    throw std::invalid_argument("simulation requires periods > burn_in >= 0");

  const int m = params.lifetime;
  const int lead = params.lead_time;
  const std::size_t slots = static_cast<std::size_t>(m - 1);
  const std::size_t on_hand = static_cast<std::size_t>(m - lead);  // incl. order when l=0
  const bool cbs = std::holds_alternative<double>(policy);

  std::vector<double> x(slots, 0.0);  // x[i]: quantity with i+1 periods of life left
  Rng rng(config.seed);

  const long long horizon = config.periods - config.burn_in;
  const long long batch_len = std::max<long long>(1, horizon / 100);
  BatchAccumulator acc_h, acc_s, acc_w, acc_cost;
  for (auto* a : {&acc_h, &acc_s, &acc_w, &acc_cost}) a->batch_len = batch_len;

  SimStats stats;
  stats.periods = config.periods;
  stats.burn_in = config.burn_in;
  stats.seed = config.seed;

  for (long long t = 0; t < config.periods; ++t) {
    const bool recording = t >= config.burn_in;
    if (recording && config.collect_samples &&
        (t - config.burn_in) % config.sample_stride == 0 &&
        stats.state_sample.size() < config.max_samples) {
      stats.state_sample.push_back(x);
    }

    double total = 0.0;
    for (double v : x) total += v;
    const double level = policy_level(policy, x);
    const double order = std::max(level - total, 0.0);

    if (cbs) {
      // Order-up-to restores the full position exactly every period.
      const double after = total + order;
      if (after > level + 1e-9)
        throw std::logic_error("base-stock position exceeded the target level");
    }

    double remaining = model.sample(rng);
    const double demand = remaining;
    double order_left = order;
    // FIFO issue over on-hand cohorts; the fresh order is servable only with
    // zero lead time.
    for (std::size_t i = 0; i < slots && i < on_hand; ++i) {
      const double take = std::min(x[i], remaining);
      x[i] -= take;
      remaining -= take;
    }
    if (lead == 0) {
      const double take = std::min(order_left, remaining);
      order_left -= take;
      remaining -= take;
    }
    const double lost = remaining;
    const double waste = slots > 0 ? x[0] : (lead == 0 ? order_left : 0.0);

    double held = 0.0;
    for (std::size_t i = 0; i < on_hand && i < slots; ++i) held += x[i];
    if (lead == 0) held += order_left;

    // Per-period flow identity: inflow equals served plus wasted plus carried.
    const double served = demand - lost;
    double carried = 0.0;
    for (std::size_t i = 1; i < slots; ++i) carried += x[i];
    if (slots > 0) carried += order_left;
    const double balance = total + order - served - waste - carried;
    if (std::fabs(balance) > 1e-9 * std::max(1.0, total + order))
      throw std::logic_error("flow conservation violated at period " + std::to_string(t));

    if (recording) {
      acc_h.add(held);
      acc_s.add(lost);
      acc_w.add(waste);
      acc_cost.add(params.h * held + params.shortage_rate() * lost +
                   params.wastage_rate() * waste);
    }

    // Age every cohort; the new order enters with m-1 periods remaining (it
    // is already one period old at the next review).
    for (std::size_t i = 0; i + 1 < slots; ++i) x[i] = x[i + 1];
    if (slots > 0) x[slots - 1] = order_left;
  }

  stats.n_h = acc_h.mean();
  stats.n_s = acc_s.mean();
  stats.n_w = acc_w.mean();
  stats.avg_cost = acc_cost.mean();
  stats.se_h = acc_h.std_error();
  stats.se_s = acc_s.std_error();
  stats.se_w = acc_w.std_error();
  stats.se_cost = acc_cost.std_error();
  stats.waste_batches = acc_w.batch_means;

  const double identity = params.h * stats.n_h + params.shortage_rate() * stats.n_s +
                          params.wastage_rate() * stats.n_w;
  if (std::fabs(identity - stats.avg_cost) > 1e-9 * std::max(1.0, std::fabs(identity)))
    throw std::logic_error("cost decomposition identity violated");
  return stats;
}

std::vector<CurvePoint> wastage_curve(const CostParams& params, const DemandModel& model,
                                      const std::vector<double>& q_grid,
                                      const SimConfig& config) {
  if (q_grid.empty()) throw std::invalid_argument("wastage curve requires a nonempty grid");
  if (!std::is_sorted(q_grid.begin(), q_grid.end()))
    throw std::invalid_argument("wastage curve grid must be sorted");
  std::vector<CurvePoint> out;
  out.reserve(q_grid.size());
  SimConfig point_cfg = config;
  point_cfg.collect_samples = false;
  for (double q : q_grid) {
    if (q < 0.0) throw std::invalid_argument("base-stock level must be nonnegative");
    const SimStats s = simulate(params, model, OrderPolicy{q}, point_cfg);
    out.push_back({q, s.n_h, s.n_s, s.n_w, s.se_h, s.se_s, s.se_w});
  }
  return out;
}

}  // namespace perish
