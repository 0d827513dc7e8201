#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perish/csv.hpp"
#include "perish/grid.hpp"
#include "perish/pipeline.hpp"

namespace {

perish::RunConfig load(const std::string& config_path, const std::string& out_override,
                       long long seed_override) {
  perish::RunConfig cfg = perish::load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  cfg.validate();
  return cfg;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::string cleaned = text;
  for (char& ch : cleaned)
    if (ch == ',') ch = ' ';
  std::istringstream is(cleaned);
  double v;
  while (is >> v) out.push_back(v);
  return out;
}

void print_report(const perish::InstanceReport& rep) {
  using perish::fmt;
  std::cout << "q_c_star=" << fmt(rep.q_c_star) << " w_ex=" << fmt(rep.w_ex)
            << " tau=" << fmt(rep.tau) << " eta=" << fmt(rep.eta)
            << " n_w=" << fmt(rep.n_w) << " cost=" << fmt(rep.heuristic_cost) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-optimal ordering policies for periodic-review perishable inventory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  bool force = false;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--seed", seed, "seed override");
  app.add_flag("--force", force, "rebuild caches");

  auto* pre = app.add_subcommand("preprocess", "stationary curves and externality scan");
  std::string dump_cdf;
  pre->add_option("--dump-cdf", dump_cdf,
                  "dump the lifetime-level effective-demand CDF for a comma-separated "
                  "inventory vector");

  auto* solve = app.add_subcommand("solve", "base-stock optimum, externality, policy table");

  auto* compare = app.add_subcommand("compare", "simulate heuristic vs benchmark policy");
  bool with_dp = false;
  compare->add_flag("--with-dp", with_dp, "benchmark against the dynamic program");

  auto* dp_cmd = app.add_subcommand("dp", "dynamic-programming benchmark policy");

  auto* sweep = app.add_subcommand("sweep", "batch comparison over the experiment cost grid");
  bool sweep_dp = false;
  sweep->add_flag("--with-dp", sweep_dp, "benchmark each row against the dynamic program");

  CLI11_PARSE(app, argc, argv);

  try {
    const perish::RunConfig cfg = load(config_path, out_dir, seed);

    if (pre->parsed()) {
      const auto result = perish::cmd_preprocess(cfg, force);
      std::cout << (result.cache_hit ? "cache hit: " : "built: ") << result.cache_path
                << " (" << result.points.size() << " points)\n";
      if (!dump_cdf.empty()) {
        const auto model = cfg.demand();
        const auto comps = parse_vector(dump_cdf);
        perish::InventoryVector x(comps, model.step());
        const double cap = 2.0 * (x.total() + cfg.m * model.mean()) + 10.0;
        perish::EffectiveDemandContext ctx(model, cfg.m, cap);
        const std::string path = cfg.out_dir + "/effective_cdf.csv";
        perish::dump_effective_cdf(ctx, x, cfg.m, path);
        std::cout << "wrote " << path << "\n";
      }
      return 0;
    }
    if (solve->parsed()) {
      const auto result = perish::cmd_solve(cfg, force);
      perish::write_solve_outputs(cfg, result);
      print_report(result.report);
      std::cout << "outputs in " << cfg.out_dir << "\n";
      return 0;
    }
    if (compare->parsed()) {
      const auto result = perish::cmd_compare(cfg, with_dp, force);
      perish::write_compare_output(cfg, result, "compare.csv");
      print_report(result.report);
      std::cout << "benchmark=" << perish::fmt(result.benchmark_cost)
                << " heuristic=" << perish::fmt(result.heuristic_cost)
                << " delta=" << perish::fmt(result.delta) << "\n";
      return 0;
    }
    if (dp_cmd->parsed()) {
      const auto model = cfg.demand();
      const auto dp = perish::dp_solve(cfg.costs(), model);
      std::filesystem::create_directories(cfg.out_dir);
      perish::CsvWriter csv(cfg.out_dir + "/dp_policy.csv");
      csv.comment("avg_cost=" + perish::fmt(dp.avg_cost) +
                  " iterations=" + perish::fmt(dp.iterations) +
                  " span=" + perish::fmt(dp.final_span));
      std::vector<std::string> header;
      for (int d = 1; d < dp.lifetime; ++d) header.push_back("x" + std::to_string(d));
      header.insert(header.end(), {"q_level", "order_amount"});
      csv.row(header);
      const long long n = dp.points_per_dim;
      if (dp.lifetime == 2) {
        for (long long i = 0; i < n; ++i) {
          const double x = perish::grid_value(i, dp.step);
          const double q = dp.order_up_to[static_cast<std::size_t>(i)];
          csv.row({perish::fmt(x), perish::fmt(q), perish::fmt(std::max(q - x, 0.0))});
        }
      } else {
        for (long long i = 0; i < n; ++i)
          for (long long j = 0; i + j < n; ++j) {
            const double x1 = perish::grid_value(i, dp.step);
            const double x2 = perish::grid_value(j, dp.step);
            const double q = dp.order_up_to[dp.flatten_state({i, j})];
            csv.row({perish::fmt(x1), perish::fmt(x2), perish::fmt(q),
                     perish::fmt(std::max(q - x1 - x2, 0.0))});
          }
      }
      std::cout << "dp avg_cost=" << perish::fmt(dp.avg_cost) << " iterations="
                << dp.iterations << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      const auto rows = perish::cmd_sweep(cfg, sweep_dp);
      std::filesystem::create_directories(cfg.out_dir);
      perish::CsvWriter csv(cfg.out_dir + "/sweep.csv");
      csv.row({"h", "r", "theta", "benchmark_cost", "heuristic_cost", "delta", "q_c_star",
               "tau", "eta", "w_ex", "n_w"});
      for (const auto& row : rows) {
        csv.row({perish::fmt(row.report.params.h), perish::fmt(row.report.params.r),
                 perish::fmt(row.report.params.theta), perish::fmt(row.benchmark_cost),
                 perish::fmt(row.heuristic_cost), perish::fmt(row.delta),
                 perish::fmt(row.report.q_c_star), perish::fmt(row.report.tau),
                 perish::fmt(row.report.eta), perish::fmt(row.report.w_ex),
                 perish::fmt(row.report.n_w)});
        std::cout << "h=" << row.report.params.h << " r=" << row.report.params.r
                  << " theta=" << row.report.params.theta
                  << " delta=" << perish::fmt(row.delta) << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
