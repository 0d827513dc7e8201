#include "perish/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "perish/csv.hpp"
#include "perish/grid.hpp"

namespace perish {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kCacheVersion = 1;

std::vector<double> qc_scan_grid(const RunConfig& cfg, const DemandModel& model) {
  const double coarse = model.discrete() ? model.step() : 10.0 * model.step();
  double hi = cfg.qc_scan_max > 0.0 ? cfg.qc_scan_max
                                    : grid_ceil_value(model.quantile(0.999) + model.mean(),
                                                      coarse);
  std::vector<double> grid;
  for (double q = 0.0; q <= hi + 1e-9; q += coarse) grid.push_back(q);
  return grid;
}

json preprocess_key(const RunConfig& cfg, const DemandModel& model,
                    const std::vector<double>& grid) {
  json key;
  key["version"] = kCacheVersion;
  key["demand"] = model.id();
  key["m"] = cfg.m;
  key["l"] = cfg.l;
  key["curve_periods"] = cfg.curve_periods;
  key["curve_burn_in"] = cfg.curve_burn_in;
  key["seed"] = cfg.seed;
  key["delta"] = cfg.delta;
  key["grid_lo"] = grid.front();
  key["grid_hi"] = grid.back();
  key["grid_n"] = grid.size();
  return key;
}

// Context window wide enough for every zero-state query and the bound solve.
std::shared_ptr<EffectiveDemandContext> make_context(const DemandModel& model, int m,
                                                     double cap) {
  return std::make_shared<EffectiveDemandContext>(model, m,
                                                  grid_ceil_value(cap, model.step()));
}

double max_scan_level(const std::vector<PreprocessPoint>& pts) {
  double hi = 0.0;
  for (const auto& p : pts) hi = std::max(hi, p.q_c);
  return hi;
}

}  // namespace

std::vector<CurvePoint> PreprocessResult::curve() const {
  std::vector<CurvePoint> out;
  out.reserve(points.size());
  for (const auto& p : points)
    out.push_back({p.q_c, p.n_h, p.n_s, p.n_w, p.se_h, p.se_s, p.se_w});
  return out;
}

namespace {

void write_preprocess_csv(const RunConfig& cfg, const PreprocessResult& result) {
  CsvWriter csv((fs::path(cfg.out_dir) / "curves.csv").string());
  csv.comment("base-stock scan curves, m=" + std::to_string(cfg.m) +
              " l=" + std::to_string(cfg.l) + " demand=" + cfg.demand().id());
  csv.row({"q_c", "n_h", "se_h", "n_s", "se_s", "n_w", "se_w", "w_ex", "se_w_ex", "wprime",
           "cdf_term", "one_sided"});
  for (const auto& p : result.points)
    csv.row({fmt(p.q_c), fmt(p.n_h), fmt(p.se_h), fmt(p.n_s), fmt(p.se_s), fmt(p.n_w),
             fmt(p.se_w), fmt(p.w_ex), fmt(p.se_w_ex), fmt(p.wprime), fmt(p.cdf_term),
             p.one_sided ? "1" : "0"});
}

}  // namespace

PreprocessResult cmd_preprocess(const RunConfig& cfg, bool force) {
  cfg.validate();
  const DemandModel model = cfg.demand();
  const CostParams params = cfg.costs();
  const std::vector<double> grid = qc_scan_grid(cfg, model);
  const json key = preprocess_key(cfg, model, grid);

  PreprocessResult result;
  const fs::path cache_dir = fs::path(cfg.out_dir) / "cache";
  const fs::path cache_file = cache_dir / ("preprocess_m" + std::to_string(cfg.m) + "_l" +
                                           std::to_string(cfg.l) + "_" + model.id() + ".json");
  result.cache_path = cache_file.string();

  if (!force && fs::exists(cache_file)) {
    try {
      std::ifstream in(cache_file);
      json doc = json::parse(in);
      if (doc.at("key") == key) {
        for (const auto& p : doc.at("points")) {
          PreprocessPoint pt;
          pt.q_c = p.at("q");
          pt.n_h = p.at("n_h");
          pt.n_s = p.at("n_s");
          pt.n_w = p.at("n_w");
          pt.se_h = p.at("se_h");
          pt.se_s = p.at("se_s");
          pt.se_w = p.at("se_w");
          pt.w_ex = p.at("w_ex");
          pt.se_w_ex = p.at("se_w_ex");
          pt.wprime = p.at("wprime");
          pt.cdf_term = p.at("cdf_term");
          pt.one_sided = p.at("one_sided");
          result.points.push_back(pt);
        }
        result.cache_hit = true;
        write_preprocess_csv(cfg, result);
        return result;
      }
      std::cerr << "note: preprocess cache key changed, rebuilding " << cache_file << "\n";
    } catch (const std::exception& e) {
      std::cerr << "note: preprocess cache unreadable (" << e.what() << "), rebuilding\n";
    }
  }

  // The stationary curves and the externality term depend on (m, l, demand)
  // only, never on the cost block.
  const SimConfig curve_cfg = cfg.curve_config();
  const auto curve = wastage_curve(params, model, grid, curve_cfg);

  const double cap =
      std::max(grid.back() + model.mean(), 2.0 * grid.back()) + 10.0 * model.step();
  auto ctx = make_context(model, cfg.m, cap);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto est = estimate_w_ex(params, model, *ctx, grid[i], curve_cfg, cfg.delta);
    PreprocessPoint pt;
    pt.q_c = grid[i];
    pt.n_h = curve[i].n_h;
    pt.n_s = curve[i].n_s;
    pt.n_w = curve[i].n_w;
    pt.se_h = curve[i].se_h;
    pt.se_s = curve[i].se_s;
    pt.se_w = curve[i].se_w;
    pt.w_ex = est.w_ex;
    pt.se_w_ex = est.std_error;
    pt.wprime = est.wprime;
    pt.cdf_term = est.cdf_term;
    pt.one_sided = est.one_sided;
    result.points.push_back(pt);
  }

  fs::create_directories(cache_dir);
  write_preprocess_csv(cfg, result);
  json doc;
  doc["key"] = key;
  doc["points"] = json::array();
  for (const auto& p : result.points) {
    json jp;
    jp["q"] = p.q_c;
    jp["n_h"] = p.n_h;
    jp["n_s"] = p.n_s;
    jp["n_w"] = p.n_w;
    jp["se_h"] = p.se_h;
    jp["se_s"] = p.se_s;
    jp["se_w"] = p.se_w;
    jp["w_ex"] = p.w_ex;
    jp["se_w_ex"] = p.se_w_ex;
    jp["wprime"] = p.wprime;
    jp["cdf_term"] = p.cdf_term;
    jp["one_sided"] = p.one_sided;
    doc["points"].push_back(jp);
  }
  std::ofstream out(cache_file);
  out << doc.dump(1) << "\n";
  return result;
}

SolveResult cmd_solve(const RunConfig& cfg, bool force_preprocess) {
  cfg.validate();
  const DemandModel model = cfg.demand();
  const CostParams params = cfg.costs();

  const PreprocessResult pre = cmd_preprocess(cfg, force_preprocess);

  // Optimal base-stock level; optionally carried over from the zero-lead-time
  // system when requested.
  CbsOptimum cbs;
  if (cfg.l > 0 && cfg.reuse_zero_leadtime_qc) {
    RunConfig zero = cfg;
    zero.l = 0;
    const PreprocessResult pre0 = cmd_preprocess(zero, force_preprocess);
    cbs = optimize_cbs(zero.costs(), model, pre0.curve(), zero.curve_config(),
                       zero.refine_periods);
  } else {
    cbs = optimize_cbs(params, model, pre.curve(), cfg.curve_config(), cfg.refine_periods);
  }

  // Final externality refinement at the optimum.
  SimConfig wex_cfg = cfg.sim_config();
  wex_cfg.periods = cfg.wex_periods;
  wex_cfg.burn_in = cfg.wex_burn_in;
  const double wex_cap = std::max(2.0 * (cbs.q_c_star + 2.0 * model.mean()),
                                  max_scan_level(pre.points)) + 10.0 * model.step();
  auto wex_ctx = make_context(model, cfg.m, wex_cap);
  ExternalityEstimate ext = estimate_w_ex(params, model, *wex_ctx, cbs.q_c_star, wex_cfg,
                                          cfg.delta);
  double w_used = std::min(0.0, std::max(ext.w_ex, -1.0 + 1e-12));

  // Bounds from a provisional window, then the policy table on its own
  // window: capped at the upper bound when finite, else wide enough for the
  // corner states.
  PolicyBounds bounds = policy_bounds(params, *wex_ctx, w_used, cfg.root_tol);
  const double tau_guess = bounds.q_dagger;
  double component_bound =
      cfg.table_bound > 0.0
          ? cfg.table_bound
          : grid_ceil_value(std::max({tau_guess, cbs.q_c_star,
                                      bounds.ddagger_finite ? bounds.q_ddagger : 0.0}) *
                                    1.15 +
                                2.0,
                            model.step());
  double table_cap;
  if (bounds.ddagger_finite) {
    table_cap = std::max(bounds.q_ddagger, bounds.q_dagger) + 4.0 * model.step() +
                std::max(1.0, 4.0 * model.step());
  } else {
    table_cap = static_cast<double>(cfg.m - 1) * component_bound + bounds.q_dagger +
                2.0 * model.mean() + 2.0;
  }
  auto table_ctx = make_context(model, cfg.m, table_cap);
  PolicyTable table =
      build_policy_table(params, *table_ctx, w_used, component_bound, cbs.q_c_star,
                         cfg.root_tol);

  if (cfg.wex_reestimate) {
    // Experimental: one extra pass with states sampled under the heuristic
    // policy instead of the base-stock policy.
    SimConfig re_cfg = wex_cfg;
    const SimStats under_h = simulate(params, model, OrderPolicy{&table}, re_cfg);
    double sum = 0.0;
    for (const auto& st : under_h.state_sample) {
      std::vector<double> snapped(st.size());
      for (std::size_t i = 0; i < st.size(); ++i)
        snapped[i] = grid_value(grid_floor_index(st[i], model.step()), model.step());
      sum += table_ctx->cdf_at(InventoryVector(snapped, model.step()), cfg.m, cbs.q_c_star);
    }
    const double cdf2 = sum / static_cast<double>(under_h.state_sample.size());
    const double w2 = std::min(0.0, ext.wprime - cdf2);
    ext.cdf_term = cdf2;
    ext.w_ex = ext.wprime - cdf2;
    w_used = std::max(w2, -1.0 + 1e-12);
    bounds = policy_bounds(params, *table_ctx, w_used, cfg.root_tol);
    table = build_policy_table(params, *table_ctx, w_used, component_bound, cbs.q_c_star,
                               cfg.root_tol);
  }

  const SimStats heur = simulate(params, model, OrderPolicy{&table}, cfg.sim_config());

  SolveResult result;
  result.table = std::move(table);
  result.cbs = cbs;
  result.externality = ext;
  result.bounds = bounds;
  result.heuristic_stats = heur;
  result.context = table_ctx;

  InstanceReport& rep = result.report;
  rep.params = params;
  rep.demand_id = model.id();
  rep.q_c_star = cbs.q_c_star;
  rep.cbs_cost = cbs.cost;
  rep.cbs_cost_se = cbs.se;
  rep.w_ex = ext.w_ex;
  rep.w_ex_se = ext.std_error;
  rep.w_ex_used = w_used;
  const PolicyIndices idx = policy_indices(result.table);
  rep.tau = idx.tau;
  rep.eta = idx.eta;
  rep.n_h = heur.n_h;
  rep.n_s = heur.n_s;
  rep.n_w = heur.n_w;
  rep.n_w_se = heur.se_w;
  rep.heuristic_cost = heur.avg_cost;
  rep.heuristic_cost_se = heur.se_cost;
  rep.q_dagger = bounds.q_dagger;
  rep.q_ddagger = bounds.q_ddagger;
  rep.q_ddagger_finite = bounds.ddagger_finite;
  rep.cbs_flags = cbs_limit_flags(result.table, *table_ctx, bounds, cbs.q_c_star, cfg.alpha);
  if (params.h > 0.0) {
    rep.m_alpha_exact = min_lifetime(params, model, cfg.alpha, MAlphaMethod::Exact);
    rep.m_alpha_normal = min_lifetime(params, model, cfg.alpha, MAlphaMethod::Normal);
  }
  return result;
}

CompareResult cmd_compare(const RunConfig& cfg, bool with_dp, bool force_preprocess) {
  CompareResult out;
  out.with_dp = with_dp;
  SolveResult solved = cmd_solve(cfg, force_preprocess);
  out.heuristic_cost = solved.heuristic_stats.avg_cost;
  out.heuristic_se = solved.heuristic_stats.se_cost;

  const DemandModel model = cfg.demand();
  const CostParams params = cfg.costs();
  if (with_dp) {
    if (cfg.l != 0 || cfg.m > 3)
      throw std::invalid_argument(
          "the dp benchmark supports zero lead time and m in {2,3} only; rerun without "
          "--with-dp");
    const DpSolution dp = dp_solve(params, model);
    out.dp_avg_cost = dp.avg_cost;
    SimConfig sim_cfg = cfg.sim_config();  // same seed as the heuristic run
    sim_cfg.collect_samples = false;
    const SimStats dp_stats = simulate(params, model, OrderPolicy{&dp}, sim_cfg);
    out.benchmark_cost = dp_stats.avg_cost;
    out.benchmark_se = dp_stats.se_cost;
    solved.report.delta_vs_dp = cost_deviation(out.heuristic_cost, out.benchmark_cost);
    solved.report.has_dp = true;
    out.delta = solved.report.delta_vs_dp;
    out.delta_se = std::sqrt(out.heuristic_se * out.heuristic_se +
                             out.benchmark_se * out.benchmark_se) /
                   out.benchmark_cost;
  } else {
    SimConfig sim_cfg = cfg.sim_config();
    sim_cfg.collect_samples = false;
    const SimStats cbs_stats =
        simulate(params, model, OrderPolicy{solved.cbs.q_c_star}, sim_cfg);
    out.benchmark_cost = cbs_stats.avg_cost;
    out.benchmark_se = cbs_stats.se_cost;
    out.delta = cost_deviation(out.heuristic_cost, out.benchmark_cost);
    out.delta_se = std::sqrt(out.heuristic_se * out.heuristic_se +
                             out.benchmark_se * out.benchmark_se) /
                   out.benchmark_cost;
  }
  out.report = solved.report;
  return out;
}

std::vector<CompareResult> cmd_sweep(const RunConfig& cfg, bool with_dp) {
  // Experiment rows: h in {0,1} crossed with (r, theta) pairs.
  static const double rows[][3] = {
      {0, 5, 5}, {0, 5, 10}, {0, 5, 20}, {0, 8, 7}, {0, 10, 5},
      {1, 5, 5}, {1, 5, 10}, {1, 5, 20}, {1, 8, 7}, {1, 10, 5},
  };
  std::vector<CompareResult> out;
  for (const auto& row : rows) {
    RunConfig instance = cfg;
    instance.h = row[0];
    instance.r = row[1];
    instance.theta = row[2];
    out.push_back(cmd_compare(instance, with_dp));
  }
  return out;
}

void dump_effective_cdf(const EffectiveDemandContext& ctx, const InventoryVector& x,
                        int level, const std::string& path) {
  auto curve = ctx.curve(x, level);
  CsvWriter csv(path);
  csv.comment("effective-demand cdf, level=" + std::to_string(level) +
              ", base_prefix=" + fmt(curve->base_prefix) +
              ", tail_mass=" + fmt(curve->tail_mass));
  csv.row({"z", "F"});
  for (std::size_t i = 0; i < curve->values.size(); ++i)
    csv.row({fmt(grid_value(static_cast<long long>(i), curve->step)), fmt(curve->values[i])});
}

namespace {

void write_report_text(const RunConfig& cfg, const InstanceReport& rep,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "demand: " << rep.demand_id << "\n";
  out << "m: " << rep.params.lifetime << "\n";
  out << "l: " << rep.params.lead_time << "\n";
  out << "h: " << fmt(rep.params.h) << "\n";
  out << "r: " << fmt(rep.params.r) << "\n";
  out << "theta: " << fmt(rep.params.theta) << "\n";
  out << "c: " << fmt(rep.params.c) << "\n";
  out << "seed: " << cfg.seed << "\n";
  out << "q_c_star: " << fmt(rep.q_c_star) << "\n";
  out << "cbs_cost: " << fmt(rep.cbs_cost) << " se " << fmt(rep.cbs_cost_se) << "\n";
  out << "w_ex: " << fmt(rep.w_ex) << " se " << fmt(rep.w_ex_se) << "\n";
  out << "w_ex_used: " << fmt(rep.w_ex_used) << "\n";
  out << "tau: " << fmt(rep.tau) << "\n";
  out << "eta: " << fmt(rep.eta) << "\n";
  out << "n_h: " << fmt(rep.n_h) << "\n";
  out << "n_s: " << fmt(rep.n_s) << "\n";
  out << "n_w: " << fmt(rep.n_w) << " se " << fmt(rep.n_w_se) << "\n";
  out << "heuristic_cost: " << fmt(rep.heuristic_cost) << " se "
      << fmt(rep.heuristic_cost_se) << "\n";
  out << "q_dagger: " << fmt(rep.q_dagger) << "\n";
  out << "q_ddagger: " << (rep.q_ddagger_finite ? fmt(rep.q_ddagger) : std::string("inf"))
      << "\n";
  out << "cbs_cdf_below_alpha: " << (rep.cbs_flags.cdf_below_alpha ? 1 : 0) << "\n";
  out << "cbs_gap_below_step: " << (rep.cbs_flags.gap_below_step ? 1 : 0) << "\n";
  out << "cbs_spread_below_step: " << (rep.cbs_flags.spread_below_step ? 1 : 0) << "\n";
  out << "f_dm_at_dagger: " << fmt(rep.cbs_flags.f_dm_at_dagger) << "\n";
  if (rep.params.h > 0.0) {
    out << "m_alpha_exact: " << rep.m_alpha_exact << "\n";
    out << "m_alpha_normal: " << rep.m_alpha_normal << "\n";
  }
  if (rep.has_dp) out << "delta_vs_dp: " << fmt(rep.delta_vs_dp) << "\n";
}

}  // namespace

void write_solve_outputs(const RunConfig& cfg, const SolveResult& result) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  write_report_text(cfg, result.report, (dir / "report.txt").string());

  {
    CsvWriter csv((dir / "policy_table.csv").string());
    csv.comment("demand=" + result.table.demand_id);
    csv.comment("m=" + std::to_string(result.report.params.lifetime) +
                " l=" + std::to_string(result.report.params.lead_time));
    csv.comment("w_ex=" + fmt(result.table.w_ex) + " q_c_star=" + fmt(result.table.q_c_star) +
                " solver_tol=" + fmt(result.table.solver_tol));
    csv.comment("tau=" + fmt(result.table.tau()) + " seed=" + fmt(static_cast<long long>(cfg.seed)));
    std::vector<std::string> header;
    for (std::size_t d = 1; d <= result.table.dims(); ++d)
      header.push_back("x" + std::to_string(d));
    header.insert(header.end(), {"q_root", "q_level", "order_amount", "recurrent"});
    csv.row(header);
    for (std::size_t i = 0; i < result.table.entry_count(); ++i) {
      const auto state = result.table.state_for_entry(i);
      const auto& e = result.table.entries()[i];
      double total = 0.0;
      std::vector<std::string> cells;
      for (double v : state) {
        cells.push_back(fmt(v));
        total += v;
      }
      cells.push_back(fmt(e.root));
      cells.push_back(fmt(e.level));
      cells.push_back(fmt(order_amount(e.level, total)));
      cells.push_back(e.recurrent ? "1" : "0");
      csv.row(cells);
    }
  }

  {
    CsvWriter csv((dir / "sim_heuristic.csv").string());
    csv.row({"stat", "value", "std_error"});
    const SimStats& s = result.heuristic_stats;
    csv.row({"n_h", fmt(s.n_h), fmt(s.se_h)});
    csv.row({"n_s", fmt(s.n_s), fmt(s.se_s)});
    csv.row({"n_w", fmt(s.n_w), fmt(s.se_w)});
    csv.row({"avg_cost", fmt(s.avg_cost), fmt(s.se_cost)});
    csv.row({"periods", fmt(s.periods), "0"});
    csv.row({"burn_in", fmt(s.burn_in), "0"});
  }

  {
    // Marginal cost/benefit curves for the empty state and the lower-bound
    // state (q_dagger units of the freshest age class).
    const auto& ctx = *result.context;
    const double step = ctx.step();
    const double hi =
        std::min(ctx.cap(), std::max(result.report.q_dagger, result.report.q_c_star) * 1.5 +
                                5.0);
    std::vector<double> grid;
    for (double q = 0.0; q <= hi + 1e-9; q += step) grid.push_back(q);
    const auto zero = InventoryVector::zeros(result.table.dims());
    const auto mm0 = mc_mb_curves(result.report.params, ctx, zero, result.report.w_ex_used,
                                  grid);
    std::vector<double> dag(result.table.dims(), 0.0);
    if (!dag.empty())
      dag.back() = grid_value(grid_floor_index(result.report.q_dagger, step), step);
    const auto mmd = mc_mb_curves(result.report.params, ctx,
                                  InventoryVector(dag, step), result.report.w_ex_used, grid);
    CsvWriter csv((cfg.out_dir + "/mc_mb.csv"));
    csv.comment("w_ex=" + fmt(result.report.w_ex_used));
    csv.row({"q", "mb", "mc_x0", "mc_xdagger"});
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv.row({fmt(grid[i]), fmt(mm0.mb[i]), fmt(mm0.mc[i]), fmt(mmd.mc[i])});
  }
}

void write_compare_output(const RunConfig& cfg, const CompareResult& result,
                          const std::string& filename) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  CsvWriter csv((dir / filename).string());
  csv.row({"h", "r", "theta", "m", "l", "demand", "benchmark", "benchmark_cost",
           "benchmark_se", "heuristic_cost", "heuristic_se", "delta", "delta_se", "dp_gain",
           "q_c_star", "tau", "eta", "w_ex"});
  csv.row({fmt(result.report.params.h), fmt(result.report.params.r),
           fmt(result.report.params.theta), fmt(static_cast<long long>(result.report.params.lifetime)),
           fmt(static_cast<long long>(result.report.params.lead_time)), result.report.demand_id,
           result.with_dp ? "dp" : "cbs", fmt(result.benchmark_cost), fmt(result.benchmark_se),
           fmt(result.heuristic_cost), fmt(result.heuristic_se), fmt(result.delta),
           fmt(result.delta_se), result.with_dp ? fmt(result.dp_avg_cost) : "",
           fmt(result.report.q_c_star), fmt(result.report.tau), fmt(result.report.eta),
           fmt(result.report.w_ex)});
}

}  // namespace perish
