#include "perish/policy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perish/grid.hpp"

namespace perish {

namespace {

std::string state_string(const std::vector<double>& state) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < state.size(); ++i) os << (i ? ", " : "") << state[i];
  os << ")";
  return os.str();
}

struct MarginalFn {
  const CostParams& params;
  const EffectiveDemandContext& ctx;
  const EffectiveCdf& wastage_cdf;   // m-period effective demand at x
  const EffectiveCdf* service_cdf;   // (l+1)-period effective demand, null when l == 0
  double w_ex;

  double operator()(double q) const {
    const double fw = wastage_cdf.interpolated(q);
    const double fs = service_cdf ? service_cdf->interpolated(q)
                                  : ctx.demand_cdf_interp(q);
    return params.wastage_rate() * fw -
           (params.h + params.shortage_rate()) * (1.0 - fs) + params.h +
           params.wastage_rate() * w_ex;
  }
};

RootResult solve_root(const MarginalFn& g, const CostParams& params,
                      const EffectiveDemandContext& ctx, double tol_scale) {
  const double tol = tol_scale * (params.theta + params.h + params.r);
  RootResult out;

  double lo = 0.0;
  double g_lo = g(lo);
  if (g_lo >= 0.0) {
    out.root = 0.0;
    out.level = 0.0;
    out.residual = g_lo;
    return out;
  }

  // Expand the upper bracket; the marginal condition is monotone in q.
  double hi = std::max(ctx.model().quantile(0.9), ctx.step());
  double g_hi = g(hi);
  int expansions = 0;
  while (g_hi <= 0.0) {
    if (hi >= ctx.cap() - ctx.step()) {
      std::ostringstream os;
      os << "marginal condition not bracketed below the context cap " << ctx.cap()
         << " (g(" << hi << ") = " << g_hi << ", w_ex = " << g.w_ex << ")";
      throw std::runtime_error(os.str());
    }
    hi = std::min(hi * 2.0 + ctx.step(), ctx.cap() - ctx.step());
    g_hi = g(hi);
    if (++expansions > 64) throw std::runtime_error("bracket expansion failed to terminate");
  }

  // Bisect to interval convergence; the residual tolerance is a reported
  // guarantee, not the stopping rule, so roots are grid-independent to
  // near machine precision.
  double mid = hi, g_mid = g_hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    g_mid = g(mid);
    ++out.iterations;
    if (g_mid == 0.0) break;
    if (g_mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-11 * std::max(1.0, hi)) {
      mid = hi;
      g_mid = g(mid);
      break;
    }
  }
  out.root = mid;
  out.residual = g_mid;
  if (std::fabs(g_mid) > tol)
    throw std::runtime_error("marginal root residual " + std::to_string(g_mid) +
                             " exceeds tolerance at q = " + std::to_string(mid));

  if (ctx.model().discrete()) {
    // Grid-feasible policy level: the smallest grid point at which the
    // marginal condition is nonnegative within the residual tolerance.
    const double s = ctx.step();
    long long idx = static_cast<long long>(std::ceil(out.root / s - 1e-9));
    if (idx < 0) idx = 0;
    while (idx > 0 && g(grid_value(idx - 1, s)) >= -tol) --idx;
    while (g(grid_value(idx, s)) < -tol && grid_value(idx, s) < ctx.cap()) ++idx;
    out.level = grid_value(idx, s);
  } else {
    out.level = out.root;
  }
  return out;
}

}  // namespace

RootResult solve_marginal(const CostParams& params, const EffectiveDemandContext& ctx,
                          const InventoryVector& x, double w_ex, double tol_scale) {
  params.validate();
  if (!(w_ex > -1.0) || w_ex > 0.0)
    throw std::invalid_argument("w_ex must lie in (-1, 0], got " + std::to_string(w_ex));
  auto wastage = ctx.curve(x, ctx.lifetime());
  MarginalFn g{params, ctx, *wastage, nullptr, w_ex};
  return solve_root(g, params, ctx, tol_scale);
}

RootResult solve_marginal_leadtime(const CostParams& params,
                                   const EffectiveDemandContext& ctx,
                                   const InventoryVector& x, double w_ex,
                                   double tol_scale) {
  if (params.lead_time == 0) return solve_marginal(params, ctx, x, w_ex, tol_scale);
  params.validate();
  if (!(w_ex > -1.0) || w_ex > 0.0)
    throw std::invalid_argument("w_ex must lie in (-1, 0], got " + std::to_string(w_ex));
  auto wastage = ctx.curve(x, ctx.lifetime());
  const int service_level = params.lead_time + 1;
  auto service = service_level == ctx.lifetime() ? wastage : ctx.curve(x, service_level);
  MarginalFn g{params, ctx, *wastage, service.get(), w_ex};
  return solve_root(g, params, ctx, tol_scale);
}

PolicyTable::PolicyTable(std::size_t dims, long long points_per_dim, double step)
    : dims_(dims), per_dim_(points_per_dim), step_(step) {
  std::size_t count = 1;
  for (std::size_t d = 0; d < dims_; ++d) count *= static_cast<std::size_t>(per_dim_);
  entries_.resize(count);
}

double PolicyTable::component_bound() const {
  return grid_value(per_dim_ - 1, step_);
}

std::size_t PolicyTable::flatten(const std::vector<long long>& idx) const {
  if (idx.size() != dims_) throw std::invalid_argument("policy index dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dims_; ++d) {
    if (idx[d] < 0 || idx[d] >= per_dim_)
      throw std::out_of_range("policy index out of table range");
    flat = flat * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(idx[d]);
  }
  return flat;
}

PolicyEntry& PolicyTable::at_indices(const std::vector<long long>& idx) {
  return entries_[flatten(idx)];
}

const PolicyEntry& PolicyTable::at_indices(const std::vector<long long>& idx) const {
  return entries_[flatten(idx)];
}

const PolicyEntry& PolicyTable::entry_for_state(const std::vector<double>& state) const {
  if (state.size() != dims_)
    throw std::invalid_argument("policy lookup for state " + state_string(state) +
                                ": expected " + std::to_string(dims_) + " components");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dims_; ++d) {
    const long long idx = grid_floor_index(state[d], step_);
    if (idx >= per_dim_)
      throw std::runtime_error("policy table has no entry for reached state " +
                               state_string(state) + " (component bound " +
                               std::to_string(component_bound()) + ")");
    flat = flat * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(idx);
  }
  return entries_[flat];
}

double PolicyTable::order_up_to(const std::vector<double>& state) const {
  return entry_for_state(state).level;
}

std::vector<double> PolicyTable::state_for_entry(std::size_t flat_index) const {
  std::vector<double> state(dims_, 0.0);
  for (std::size_t d = dims_; d-- > 0;) {
    state[d] = grid_value(static_cast<long long>(flat_index %
                                                 static_cast<std::size_t>(per_dim_)),
                          step_);
    flat_index /= static_cast<std::size_t>(per_dim_);
  }
  return state;
}

PolicyTable build_policy_table(const CostParams& params, const EffectiveDemandContext& ctx,
                               double w_ex, double component_bound, double q_c_star,
                               double tol_scale) {
  params.validate();
  const double s = ctx.step();
  const auto dims = static_cast<std::size_t>(params.lifetime - 1);
  const long long per_dim = grid_floor_index(component_bound, s) + 1;
  PolicyTable table(dims, per_dim, s);
  table.demand_id = ctx.model().id();
  table.w_ex = w_ex;
  table.q_c_star = q_c_star;
  table.solver_tol = tol_scale * (params.theta + params.h + params.r);

  const std::size_t count = table.entry_count();
  std::vector<long long> idx(dims, 0);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::vector<double> comps(dims);
    for (std::size_t d = 0; d < dims; ++d) comps[d] = grid_value(idx[d], s);
    InventoryVector x(std::move(comps), s);
    RootResult r;
    try {
      r = solve_marginal_leadtime(params, ctx, x, w_ex, tol_scale);
    } catch (const std::exception& e) {
      throw std::runtime_error("policy solve failed at state " +
                               state_string(x.components()) + ": " + e.what());
    }
    PolicyEntry& entry = table.at_indices(idx);
    entry.root = r.root;
    entry.level = r.level;
    entry.residual = r.residual;
    // Odometer over the grid, last dimension fastest.
    for (std::size_t d = dims; d-- > 0;) {
      if (++idx[d] < per_dim) break;
      idx[d] = 0;
    }
  }

  const double tau = dims == 0
                         ? table.entries().front().level
                         : table.at_indices(std::vector<long long>(dims, 0)).level;
  table.set_tau(tau);
  for (std::size_t flat = 0; flat < count; ++flat) {
    const auto state = table.state_for_entry(flat);
    double total = 0.0;
    for (double v : state) total += v;
    table.mutable_entries()[flat].recurrent = total <= tau + 1e-9;
  }
  return table;
}

}  // namespace perish
