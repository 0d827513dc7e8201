#include "perish/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "perish/grid.hpp"

namespace perish {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// CDF of the sum of m i.i.d. demands at z, by closed form where available.
double m_fold_cdf(const DemandModel& model, int m, double z) {
  switch (model.kind()) {
    case DemandKind::Exponential: {
      // Erlang(m, 1/mean): P(sum <= z) = P(Poisson(z/mean) >= m).
      const double lam = z / model.mean();
      double term = std::exp(-lam);
      double cum = term;
      for (int k = 1; k < m; ++k) {
        term *= lam / static_cast<double>(k);
        cum += term;
      }
      return std::max(0.0, 1.0 - cum);
    }
    case DemandKind::Poisson: {
      double term = std::exp(-model.mean() * m);
      double cum = term;
      const long long k = static_cast<long long>(std::floor(z + 1e-9));
      for (long long j = 1; j <= k; ++j) {
        term *= model.mean() * m / static_cast<double>(j);
        cum += term;
      }
      return std::min(cum, 1.0);
    }
    case DemandKind::Finite: {
      const auto support =
          static_cast<std::size_t>(grid_floor_index(model.grid_max(), model.step())) + 1;
      std::vector<double> base = model.cell_pmf_left(support, false);
      std::vector<double> acc = base;
      for (int fold = 1; fold < m; ++fold) {
        std::vector<double> next(acc.size() + base.size() - 1, 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i)
          for (std::size_t j = 0; j < base.size(); ++j) next[i + j] += acc[i] * base[j];
        acc = std::move(next);
      }
      const long long k = grid_floor_index(z, model.step());
      double cum = 0.0;
      for (std::size_t i = 0; i < acc.size() && static_cast<long long>(i) <= k; ++i)
        cum += acc[i];
      return cum;
    }
  }
  return 0.0;
}

}  // namespace

double cost_deviation(double l_h, double l_star) {
  if (!(l_star > 0.0))
    throw std::invalid_argument("cost deviation requires a positive benchmark cost");
  return (l_h - l_star) / l_star;
}

PolicyIndices policy_indices(const PolicyTable& table) {
  PolicyIndices out;
  out.tau = table.tau();
  if (table.dims() == 0) {
    out.eta = std::nan("");
    return out;
  }
  const double s = table.step();
  const long long tau_idx = grid_floor_index(out.tau, s);
  if (tau_idx >= table.points_per_dim())
    throw std::invalid_argument("policy table is missing the tau boundary entry at x_{m-1} = " +
                                std::to_string(out.tau));
  std::vector<long long> zero(table.dims(), 0);
  std::vector<long long> edge(table.dims(), 0);
  edge.back() = tau_idx;
  const double order_zero = table.at_indices(zero).level;
  const double tau_grid = grid_value(tau_idx, s);
  const double order_edge = table.at_indices(edge).level - tau_grid;
  if (tau_grid <= 0.0) {
    out.eta = std::nan("");
    return out;
  }
  out.eta = (order_edge - order_zero) / tau_grid;
  return out;
}

int min_lifetime(const CostParams& params, const DemandModel& model, double alpha,
                 MAlphaMethod method) {
  params.validate();
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(params.h > 0.0))
    throw std::invalid_argument(
        "the constant base-stock limit requires h > 0; no finite lifetime reaches it");
  const double q_gamma = model.quantile(params.critical_ratio());
  for (int m = 1; m <= 10000; ++m) {
    double f;
    if (method == MAlphaMethod::Exact) {
      f = m_fold_cdf(model, m, q_gamma);
    } else {
      const double mu = static_cast<double>(m) * model.mean();
      const double sd = std::sqrt(static_cast<double>(m) * model.variance());
      f = normal_cdf((q_gamma - mu) / sd);
    }
    if (f <= alpha) return m;
  }
  throw std::runtime_error("no lifetime below 10000 reaches the base-stock limit");
}

McMbCurves mc_mb_curves(const CostParams& params, const EffectiveDemandContext& ctx,
                        const InventoryVector& x, double w_ex,
                        const std::vector<double>& q_grid) {
  params.validate();
  McMbCurves out;
  auto curve = ctx.curve(x, params.lifetime);
  for (double q : q_grid) {
    out.q.push_back(q);
    out.mc.push_back(params.wastage_rate() * curve->at(q));
    const double fbar = ctx.model().discrete() ? 1.0 - ctx.demand_cdf_interp(q)
                                               : ctx.model().survival(q);
    out.mb.push_back((params.h + params.shortage_rate()) * fbar - params.h -
                     params.wastage_rate() * w_ex);
  }
  return out;
}

PolicyBounds policy_bounds(const CostParams& params, const EffectiveDemandContext& ctx,
                           double w_ex, double tol_scale) {
  params.validate();
  PolicyBounds out;
  const auto zero = InventoryVector::zeros(static_cast<std::size_t>(params.lifetime - 1));
  out.q_dagger = solve_marginal_leadtime(params, ctx, zero, w_ex, tol_scale).root;

  // Large-inventory limit of the zero-lead-time condition: the wastage CDF
  // vanishes, leaving -(h+r-c) Fbar_D(q) + h + (theta+c) w_ex = 0, which
  // crosses zero only when h + (theta+c) w_ex > 0. With a positive lead time
  // the service distribution shifts together with the pipeline, so the
  // large-inventory root diverges and no finite bound exists.
  const double limit = params.h + params.wastage_rate() * w_ex;
  if (params.lead_time > 0 || !(limit > 0.0)) {
    out.ddagger_finite = false;
    out.q_ddagger = std::numeric_limits<double>::infinity();
    return out;
  }
  const double target = limit / (params.h + params.shortage_rate());
  if (target >= 1.0) {
    out.ddagger_finite = true;
    out.q_ddagger = 0.0;
    return out;
  }
  out.ddagger_finite = true;
  if (!ctx.model().discrete()) {
    out.q_ddagger = ctx.model().quantile(1.0 - target);
    return out;
  }
  // Piecewise-linear inverse, consistent with the root solver's view and
  // converged to the same interval precision.
  double lo = 0.0, hi = ctx.model().quantile(1.0 - target);
  auto g = [&](double q) {
    return -(params.h + params.shortage_rate()) * (1.0 - ctx.demand_cdf_interp(q)) + limit;
  };
  if (g(lo) >= 0.0) {
    out.q_ddagger = 0.0;
    return out;
  }
  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (v == 0.0 || hi - lo < 1e-12 * std::max(1.0, hi)) break;
    (v < 0.0 ? lo : hi) = mid;
  }
  out.q_ddagger = mid;
  return out;
}

CbsLimitFlags cbs_limit_flags(const PolicyTable& table, const EffectiveDemandContext& ctx,
                              const PolicyBounds& bounds, double q_c_star, double alpha) {
  CbsLimitFlags out;
  const auto zero = InventoryVector::zeros(table.dims());
  out.f_dm_at_dagger = ctx.cdf_at(zero, ctx.lifetime(), bounds.q_dagger);
  out.cdf_below_alpha = out.f_dm_at_dagger <= alpha;
  out.gap = bounds.ddagger_finite
                ? bounds.q_ddagger - bounds.q_dagger
                : std::numeric_limits<double>::infinity();
  out.gap_below_step = out.gap <= table.step() + 1e-9;
  double spread = 0.0;
  for (std::size_t i = 0; i < table.entry_count(); ++i) {
    const auto& e = table.entries()[i];
    if (!e.recurrent) continue;
    spread = std::max(spread, std::fabs(e.level - q_c_star));
  }
  out.spread = spread;
  out.spread_below_step = spread <= table.step() + 1e-9;
  return out;
}

}  // namespace perish
