#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perish/analysis.hpp"
#include "perish/cbs.hpp"
#include "perish/config.hpp"
#include "perish/dp.hpp"
#include "perish/externality.hpp"
#include "perish/policy.hpp"
#include "perish/simulator.hpp"

namespace perish {

// One preprocessed point of the base-stock scan: stationary curves plus the
// externality estimate, all cost-independent.
struct PreprocessPoint {
  double q_c = 0.0;
  double n_h = 0.0, n_s = 0.0, n_w = 0.0;
  double se_h = 0.0, se_s = 0.0, se_w = 0.0;
  double w_ex = 0.0, se_w_ex = 0.0;
  double wprime = 0.0, cdf_term = 0.0;
  bool one_sided = false;
};

struct PreprocessResult {
  std::vector<PreprocessPoint> points;
  bool cache_hit = false;
  std::string cache_path;
  std::vector<CurvePoint> curve() const;  // simulator-facing view
};

// Two-step pipeline: preprocess is keyed by lifetime, lead
// time, and demand only; reruns with an identical key reuse the cache.
PreprocessResult cmd_preprocess(const RunConfig& cfg, bool force = false);

struct InstanceReport {
  CostParams params;
  std::string demand_id;
  double q_c_star = 0.0;
  double cbs_cost = 0.0, cbs_cost_se = 0.0;
  double w_ex = 0.0, w_ex_se = 0.0, w_ex_used = 0.0;
  double tau = 0.0, eta = 0.0;
  double n_h = 0.0, n_s = 0.0, n_w = 0.0;
  double heuristic_cost = 0.0, heuristic_cost_se = 0.0, n_w_se = 0.0;
  double q_dagger = 0.0, q_ddagger = 0.0;
  bool q_ddagger_finite = false;
  CbsLimitFlags cbs_flags;
  int m_alpha_exact = 0, m_alpha_normal = 0;  // 0 when h == 0
  double delta_vs_dp = 0.0;
  bool has_dp = false;
};

struct SolveResult {
  PolicyTable table;
  InstanceReport report;
  CbsOptimum cbs;
  ExternalityEstimate externality;
  PolicyBounds bounds;
  SimStats heuristic_stats;
  std::shared_ptr<EffectiveDemandContext> context;
};

SolveResult cmd_solve(const RunConfig& cfg, bool force_preprocess = false);

struct CompareResult {
  InstanceReport report;
  double heuristic_cost = 0.0, heuristic_se = 0.0;
  double benchmark_cost = 0.0, benchmark_se = 0.0;  // DP policy or optimal CBS
  double delta = 0.0;
  double delta_se = 0.0;     // conservative: ignores the common-random-number coupling
  double dp_avg_cost = 0.0;  // relative-value-iteration gain, when with_dp
  bool with_dp = false;
};

// Simulates the heuristic against the benchmark policy on common random
// numbers. with_dp requires zero lead time and m in {2,3}; otherwise the
// benchmark is the optimal constant base-stock policy.
CompareResult cmd_compare(const RunConfig& cfg, bool with_dp, bool force_preprocess = false);

// Table-style batch over the experiment cost grid, sharing one preprocess
// cache. Returns one CompareResult per (h, r, theta) row.
std::vector<CompareResult> cmd_sweep(const RunConfig& cfg, bool with_dp);

void dump_effective_cdf(const EffectiveDemandContext& ctx, const InventoryVector& x,
                        int level, const std::string& path);

void write_solve_outputs(const RunConfig& cfg, const SolveResult& result);
void write_compare_output(const RunConfig& cfg, const CompareResult& result,
                          const std::string& filename);

}  // namespace perish
