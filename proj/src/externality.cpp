#include "perish/externality.hpp"

#include <cmath>
#include <stdexcept>

#include "perish/grid.hpp"

namespace perish {

ExternalityEstimate estimate_w_ex(const CostParams& params, const DemandModel& model,
                                  const EffectiveDemandContext& ctx, double q_c,
                                  const SimConfig& config, double delta) {
  params.validate();
  if (q_c < 0.0) throw std::invalid_argument("base-stock level must be nonnegative");

  ExternalityEstimate est;
  est.q_c = q_c;

  if (params.lifetime == 1) {
    // Both terms equal F_D(q_c): the wastage curve is E[q - D]^+ and the
    // one-period effective demand is D itself.
    est.wprime = model.cdf(q_c);
    est.cdf_term = est.wprime;
    est.w_ex = 0.0;
    est.v_ex = 0.0;
    est.delta = 0.0;
    return est;
  }

  if (delta <= 0.0) delta = model.discrete() ? model.step() : 5.0 * model.step();
  est.delta = delta;
  est.one_sided = q_c - delta < 0.0;

  const double q_lo = est.one_sided ? q_c : q_c - delta;
  const double q_hi = q_c + delta;
  const double span = q_hi - q_lo;

  SimConfig cfg = config;
  cfg.collect_samples = false;
  const SimStats lo = simulate(params, model, OrderPolicy{q_lo}, cfg);
  const SimStats hi = simulate(params, model, OrderPolicy{q_hi}, cfg);
  cfg.collect_samples = true;
  const SimStats mid = simulate(params, model, OrderPolicy{q_c}, cfg);
  est.periods = cfg.periods;

  // Common random numbers couple the paths, so the slope is estimated from
  // per-batch differences.
  est.wprime = (hi.n_w - lo.n_w) / span;
  const std::size_t b = std::min(lo.waste_batches.size(), hi.waste_batches.size());
  if (b >= 2) {
    double m = 0.0;
    for (std::size_t i = 0; i < b; ++i)
      m += (hi.waste_batches[i] - lo.waste_batches[i]) / span;
    m /= static_cast<double>(b);
    double var = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double d = (hi.waste_batches[i] - lo.waste_batches[i]) / span - m;
      var += d * d;
    }
    var /= static_cast<double>(b - 1);
    est.se_wprime = std::sqrt(var / static_cast<double>(b));
  }

  if (mid.state_sample.empty())
    throw std::runtime_error("externality estimate requires a nonempty state sample");
  est.samples = mid.state_sample.size();

  // Average the analytic effective-demand CDF over the sampled states;
  // continuous states snap down to the grid for the convolution lookup.
  const double s = model.step();
  double sum = 0.0, sumsq = 0.0;
  for (const auto& state : mid.state_sample) {
    std::vector<double> snapped(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
      snapped[i] = grid_value(grid_floor_index(state[i], s), s);
    const double f = ctx.cdf_at(InventoryVector(snapped, s), params.lifetime, q_c);
    sum += f;
    sumsq += f * f;
  }
  const auto n = static_cast<double>(est.samples);
  est.cdf_term = sum / n;
  if (est.samples >= 2) {
    const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    est.se_cdf = std::sqrt(var / n);
  }

  est.w_ex = est.wprime - est.cdf_term;
  est.v_ex = params.wastage_rate() * est.w_ex;
  est.std_error = std::sqrt(est.se_wprime * est.se_wprime + est.se_cdf * est.se_cdf);
  return est;
}

}  // namespace perish
