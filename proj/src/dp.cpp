#include "perish/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "perish/grid.hpp"

namespace perish {

namespace {

struct DpGrid {
  double step;
  long long n;          // grid points per dimension (indices 0..n-1)
  std::vector<double> pmf;    // left-mass discretized demand, tail folded
  std::vector<double> cdf;    // cumulative pmf
  std::vector<double> e_hold;   // E[a*s - D]^+ per action index
  std::vector<double> e_short;  // E[D - a*s]^+ per action index
};

DpGrid make_grid(const DemandModel& model, double bound) {
  DpGrid g;
  g.step = model.step();
  g.n = grid_floor_index(bound, g.step) + 1;
  const auto support = static_cast<std::size_t>(grid_floor_index(model.grid_max(), g.step)) + 1;
  g.pmf = model.cell_pmf_left(support, true);
  g.cdf.resize(support);
  double cum = 0.0;
  double mean = 0.0;
  for (std::size_t j = 0; j < support; ++j) {
    cum += g.pmf[j];
    g.cdf[j] = cum;
    mean += grid_value(static_cast<long long>(j), g.step) * g.pmf[j];
  }
  g.e_hold.resize(static_cast<std::size_t>(g.n), 0.0);
  g.e_short.resize(static_cast<std::size_t>(g.n), 0.0);
  double acc = 0.0;
  for (long long a = 0; a < g.n; ++a) {
    g.e_hold[static_cast<std::size_t>(a)] = acc * g.step;
    g.e_short[static_cast<std::size_t>(a)] =
        mean - grid_value(a, g.step) + g.e_hold[static_cast<std::size_t>(a)];
    const std::size_t idx = std::min(static_cast<std::size_t>(a), g.cdf.size() - 1);
    acc += g.cdf[idx];
  }
  return g;
}

double cdf_at(const DpGrid& g, long long idx) {
  if (idx < 0) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(idx), g.cdf.size() - 1);
  return g.cdf[i];
}

double pmf_at(const DpGrid& g, long long idx) {
  if (idx < 0 || static_cast<std::size_t>(idx) >= g.pmf.size()) return 0.0;
  return g.pmf[static_cast<std::size_t>(idx)];
}

// CDF curves of the two-period effective demand D^2(x_1) for every grid x_1,
// evaluated on the action window. Built from the x_1 = 0 convolution by the
// censoring recurrence.
std::vector<std::vector<double>> effective2_curves(const DpGrid& g) {
  const auto n = static_cast<std::size_t>(g.n);
  std::vector<std::vector<double>> f2(n, std::vector<double>(n, 0.0));
  for (std::size_t z = 0; z < n; ++z) {
    double acc = 0.0;
    for (std::size_t xi = 0; xi <= z; ++xi) acc += cdf_at(g, static_cast<long long>(z - xi)) * pmf_at(g, static_cast<long long>(xi));
    f2[0][z] = acc;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double fk = cdf_at(g, static_cast<long long>(k));
    for (std::size_t z = 0; z < n; ++z) {
      double v = f2[k][z] - fk * pmf_at(g, static_cast<long long>(z) - static_cast<long long>(k));
      if (z < k + 1) v = 0.0;
      f2[k + 1][z] = std::max(v, 0.0);
    }
  }
  return f2;
}

std::vector<double> cumulative_expectation(const std::vector<double>& curve, double step) {
  std::vector<double> out(curve.size(), 0.0);
  double acc = 0.0;
  for (std::size_t a = 0; a < curve.size(); ++a) {
    out[a] = acc * step;
    acc += curve[a];
  }
  return out;
}

struct SweepResult {
  double span;
  double low;
  double high;
};

DpSolution solve_m2(const CostParams& params, const DpGrid& g, const DpConfig& cfg) {
  const auto n = static_cast<std::size_t>(g.n);
  const double tau = cfg.damping;
  const double eps = cfg.epsilon;

  auto f2 = effective2_curves(g);
  // stage[k][a] = h E[a-D]^+ + (r-c) E[D-a]^+ + (theta+c) E[a - D^2(k)]^+
  std::vector<std::vector<double>> stage(n);
  for (std::size_t k = 0; k < n; ++k) {
    stage[k] = cumulative_expectation(f2[k], g.step);
    for (std::size_t a = 0; a < n; ++a)
      stage[k][a] = params.h * g.e_hold[a] + params.shortage_rate() * g.e_short[a] +
                    params.wastage_rate() * stage[k][a];
  }
  f2.clear();
  f2.shrink_to_fit();

  std::vector<double> v(n, 0.0), w(n, 0.0), g0(n, 0.0);
  std::vector<std::vector<double>> gk(n, std::vector<double>(n, 0.0));
  DpSolution sol;
  sol.lifetime = 2;
  sol.step = g.step;
  sol.points_per_dim = g.n;

  auto v_at = [&](long long i) { return v[static_cast<std::size_t>(i < 0 ? 0 : i)]; };

  double g_mid = 0.0;
  for (long long it = 0; it < cfg.max_iterations; ++it) {
    // Expected next value after censoring demand at the carried stock:
    // g0[a] = E_j v([a-j]^+), then gk[k][a] steps the censor point.
    for (std::size_t a = 0; a < n; ++a) {
      double acc = (a == 0) ? v[0]
                            : (1.0 - cdf_at(g, static_cast<long long>(a) - 1)) * v[0];
      for (std::size_t j = 0; j < a; ++j) acc += pmf_at(g, static_cast<long long>(j)) * v[a - j];
      g0[a] = acc;
    }
    for (std::size_t a = 0; a < n; ++a) gk[0][a] = g0[a];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double fk = cdf_at(g, static_cast<long long>(k));
      for (std::size_t a = 0; a < n; ++a) {
        const long long am1 = static_cast<long long>(a) - static_cast<long long>(k) - 1;
        gk[k + 1][a] = gk[k][a] + fk * (v_at(am1) - v_at(am1 + 1));
      }
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = k; a < n; ++a) {
        const double cand = stage[k][a] + tau * gk[k][a];
        if (cand < best) best = cand;
      }
      w[k] = best + (1.0 - tau) * v[k];
      const double d = w[k] - v[k];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    sol.span_history.push_back(hi - lo);
    sol.iterations = it + 1;
    g_mid = 0.5 * (lo + hi);
    const double ref = w[0];
    for (std::size_t k = 0; k < n; ++k) v[k] = w[k] - ref;
    if (hi - lo <= eps) break;
  }
  sol.final_span = sol.span_history.back();
  sol.avg_cost = g_mid;

  // Greedy policy extraction on the converged relative values.
  for (std::size_t a = 0; a < n; ++a) {
    double acc = (a == 0) ? v[0]
                          : (1.0 - cdf_at(g, static_cast<long long>(a) - 1)) * v[0];
    for (std::size_t j = 0; j < a; ++j) acc += pmf_at(g, static_cast<long long>(j)) * v[a - j];
    g0[a] = acc;
  }
  for (std::size_t a = 0; a < n; ++a) gk[0][a] = g0[a];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double fk = cdf_at(g, static_cast<long long>(k));
    for (std::size_t a = 0; a < n; ++a) {
      const long long am1 = static_cast<long long>(a) - static_cast<long long>(k) - 1;
      gk[k + 1][a] = gk[k][a] + fk * (v_at(am1) - v_at(am1 + 1));
    }
  }
  sol.order_up_to.assign(n, 0.0);
  bool bound_hit = false;
  for (std::size_t k = 0; k < n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = k;
    for (std::size_t a = k; a < n; ++a) {
      const double cand = stage[k][a] + tau * gk[k][a];
      if (cand < best) {
        best = cand;
        best_a = a;
      }
    }
    sol.order_up_to[k] = grid_value(static_cast<long long>(best_a), g.step);
    if (best_a == n - 1 && k < n - 1) bound_hit = true;
  }
  if (bound_hit) throw std::runtime_error("dp action bound hit");
  return sol;
}

DpSolution solve_m3(const CostParams& params, const DemandModel& model, const DpGrid& g,
                    const DpConfig& cfg) {
  const auto n = static_cast<std::size_t>(g.n);
  const std::size_t support = g.pmf.size();
  const double states_actions =
      0.5 * static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n) *
      static_cast<double>(support);
  if (states_actions > 3e9)
    throw std::runtime_error(
        "dp benchmark state space too large for m=3 with demand " + model.id() +
        " on step " + std::to_string(g.step));

  auto f2 = effective2_curves(g);
  // Three-period effective-demand expectations per (k1, k2) state.
  std::vector<std::vector<double>> e_waste(n * n);
  for (std::size_t k1 = 0; k1 < n; ++k1) {
    std::vector<double> f3(n, 0.0);
    for (std::size_t z = 0; z < n; ++z) {
      double acc = 0.0;
      for (std::size_t xi = 0; xi <= z; ++xi)
        acc += f2[k1][z - xi] * pmf_at(g, static_cast<long long>(xi));
      f3[z] = acc;
    }
    for (std::size_t k2 = 0; k1 + k2 < n; ++k2) {
      e_waste[k1 * n + k2] = cumulative_expectation(f3, g.step);
      const double fcut = f2[k1][k1 + k2];
      for (std::size_t z = 0; z < n; ++z) {
        double nv = f3[z] - fcut * pmf_at(g, static_cast<long long>(z) -
                                                 static_cast<long long>(k1 + k2));
        if (z < k1 + k2 + 1) nv = 0.0;
        f3[z] = std::max(nv, 0.0);
      }
    }
  }
  f2.clear();
  f2.shrink_to_fit();

  const double tau = cfg.damping;
  const double eps = cfg.epsilon;
  std::vector<double> v(n * n, 0.0), w(n * n, 0.0);
  DpSolution sol;
  sol.lifetime = 3;
  sol.step = g.step;
  sol.points_per_dim = g.n;

  auto expected_next = [&](std::size_t k1, std::size_t k2, std::size_t a) {
    // FIFO issue: k1 first, then k2, then the order a - k1 - k2.
    const std::size_t order = a - k1 - k2;
    double acc = 0.0;
    for (std::size_t j = 0; j < a; ++j) {
      const double pj = pmf_at(g, static_cast<long long>(j));
      if (pj == 0.0) {
        if (j >= support) break;
        continue;
      }
      const std::size_t s2 = j <= k1 ? 0 : std::min(j - k1, k2);
      const std::size_t s3 = j <= k1 + k2 ? 0 : std::min(j - k1 - k2, order);
      acc += pj * v[(k2 - s2) * n + (order - s3)];
    }
    const double tail = a == 0 ? 1.0 : 1.0 - cdf_at(g, static_cast<long long>(a) - 1);
    acc += tail * v[0];
    return acc;
  };

  double g_mid = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> states;
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k1 + k2 < n; ++k2) states.emplace_back(k1, k2);

  for (long long it = 0; it < cfg.max_iterations; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [k1, k2] : states) {
      const std::size_t total = k1 + k2;
      const auto& ew = e_waste[k1 * n + k2];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = total; a < n; ++a) {
        const double stage = params.h * g.e_hold[a] +
                             params.shortage_rate() * g.e_short[a] +
                             params.wastage_rate() * ew[a];
        const double cand = stage + tau * expected_next(k1, k2, a);
        if (cand < best) best = cand;
      }
      const std::size_t flat = k1 * n + k2;
      w[flat] = best + (1.0 - tau) * v[flat];
      const double d = w[flat] - v[flat];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    sol.span_history.push_back(hi - lo);
    sol.iterations = it + 1;
    g_mid = 0.5 * (lo + hi);
    const double ref = w[0];
    for (const auto& [k1, k2] : states) {
      const std::size_t flat = k1 * n + k2;
      v[flat] = w[flat] - ref;
    }
    if (hi - lo <= eps) break;
  }
  sol.final_span = sol.span_history.back();
  sol.avg_cost = g_mid;

  sol.order_up_to.assign(n * n, 0.0);
  bool bound_hit = false;
  for (const auto& [k1, k2] : states) {
    const std::size_t total = k1 + k2;
    const auto& ew = e_waste[k1 * n + k2];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = total;
    for (std::size_t a = total; a < n; ++a) {
      const double stage = params.h * g.e_hold[a] + params.shortage_rate() * g.e_short[a] +
                           params.wastage_rate() * ew[a];
      const double cand = stage + tau * expected_next(k1, k2, a);
      if (cand < best) {
        best = cand;
        best_a = a;
      }
    }
    sol.order_up_to[k1 * n + k2] = grid_value(static_cast<long long>(best_a), g.step);
    if (best_a == n - 1 && total < n - 1) bound_hit = true;
  }
  if (bound_hit) throw std::runtime_error("dp action bound hit");
  return sol;
}

}  // namespace

std::size_t DpSolution::flatten_state(const std::vector<long long>& idx) const {
  if (idx.size() != static_cast<std::size_t>(lifetime - 1))
    throw std::invalid_argument("dp state dimension mismatch");
  std::size_t flat = 0;
  for (long long i : idx) {
    if (i < 0 || i >= points_per_dim) throw std::out_of_range("dp state index out of range");
    flat = flat * static_cast<std::size_t>(points_per_dim) + static_cast<std::size_t>(i);
  }
  return flat;
}

double DpSolution::policy_level(const std::vector<double>& state) const {
  std::vector<long long> idx(state.size());
  for (std::size_t d = 0; d < state.size(); ++d) {
    idx[d] = grid_floor_index(state[d], step);
    if (idx[d] >= points_per_dim) idx[d] = points_per_dim - 1;
  }
  return order_up_to[flatten_state(idx)];
}

DpSolution dp_solve(const CostParams& params, const DemandModel& model,
                    const DpConfig& config) {
  params.validate();
  if (params.lead_time != 0)
    throw std::invalid_argument("dp benchmark requires zero lead time");
  if (params.lifetime != 2 && params.lifetime != 3)
    throw std::invalid_argument(
        "dp benchmark supports m in {2,3} only; larger lifetimes blow up the state space");

  DpConfig cfg = config;
  if (cfg.epsilon <= 0.0) cfg.epsilon = 1e-6 * model.mean();
  if (cfg.bound <= 0.0)
    cfg.bound = grid_ceil_value(model.quantile(0.999) * 1.1 + 2.0, model.step());
  if (!(cfg.damping > 0.0) || cfg.damping >= 1.0)
    throw std::invalid_argument("dp damping must lie in (0, 1)");

  for (int attempt = 0; attempt < 3; ++attempt) {
    const DpGrid grid = make_grid(model, cfg.bound);
    try {
      DpSolution sol = params.lifetime == 2 ? solve_m2(params, grid, cfg)
                                            : solve_m3(params, model, grid, cfg);
      return sol;
    } catch (const std::runtime_error& e) {
      if (std::string(e.what()) != "dp action bound hit" || attempt == 2)
        throw;
      cfg.bound = grid_ceil_value(cfg.bound * 1.5, model.step());
    }
  }
  throw std::runtime_error("dp benchmark failed to find a non-binding action bound");
}

std::vector<std::pair<double, double>> dp_order_amounts(const DpSolution& solution,
                                                        double fixed_other) {
  std::vector<std::pair<double, double>> out;
  const long long fixed_idx = grid_floor_index(fixed_other, solution.step);
  if (fixed_idx >= solution.points_per_dim)
    throw std::invalid_argument("dp order-amount slice outside the solved grid");
  for (long long i = 0; i < solution.points_per_dim; ++i) {
    std::vector<long long> idx;
    if (solution.lifetime == 2) {
      idx = {i};
    } else {
      idx = {fixed_idx, i};
      if (fixed_idx + i >= solution.points_per_dim) break;
    }
    const double x = grid_value(i, solution.step);
    const double total = x + grid_value(fixed_idx, solution.step) *
                                 (solution.lifetime == 3 ? 1.0 : 0.0);
    const double q = solution.order_up_to[solution.flatten_state(idx)];
    out.emplace_back(x, std::max(q - total, 0.0));
  }
  return out;
}

}  // namespace perish
