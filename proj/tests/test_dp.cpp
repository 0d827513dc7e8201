#include <cmath>
#include <vector>

#include "doctest.h"
#include "perish/dp.hpp"
#include "perish/simulator.hpp"
#include "support/oracles.hpp"

using perish::CostParams;
using perish::DemandModel;
using perish::DpConfig;
using perish::DpSolution;

namespace {

CostParams make_params(double h, double r, double theta, int m) {
  CostParams p;
  p.h = h;
  p.r = r;
  p.theta = theta;
  p.lifetime = m;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("dp");

TEST_CASE("degenerate zero demand orders nothing at zero cost") {
  const auto model = DemandModel::finite({0}, {1.0});
  const auto params = make_params(1, 5, 5, 2);
  DpConfig cfg;
  cfg.bound = 6.0;
  const auto sol = dp_solve(params, model, cfg);
  CHECK(sol.avg_cost == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(sol.order_up_to[0] == 0.0);  // empty state stays empty
}

TEST_CASE("tiny uniform instance equals exhaustive policy enumeration") {
  const auto model = DemandModel::finite({0, 1, 2}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  oracles::TinyChain chain;
  chain.demand_pmf = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  chain.state_bound = 4;

  for (const auto& costs : {std::array<double, 3>{1, 5, 5},
                            std::array<double, 3>{0, 5, 5},
                            std::array<double, 3>{1, 10, 5},
                            std::array<double, 3>{0.5, 8, 20}}) {
    const auto params = make_params(costs[0], costs[1], costs[2], 2);
    const auto best = chain.enumerate_best(costs[0], costs[1], costs[2]);

    DpConfig cfg;
    cfg.bound = 4.0;
    cfg.epsilon = 1e-12;
    const auto sol = dp_solve(params, model, cfg);
    CHECK(sol.avg_cost == doctest::Approx(best.cost).epsilon(1e-8));

    // The greedy policy evaluated through the exact chain attains the same
    // average cost (ties between optimal policies are allowed).
    std::vector<int> greedy(5);
    for (int x = 0; x <= 4; ++x)
      greedy[x] = static_cast<int>(sol.order_up_to[static_cast<std::size_t>(x)]);
    const double greedy_cost = chain.average_cost(greedy, costs[0], costs[1], costs[2]);
    CHECK(greedy_cost == doctest::Approx(best.cost).epsilon(1e-10));
  }
}

TEST_CASE("span history contracts without oscillation at termination") {
  const auto model = DemandModel::poisson(10.0);
  const auto params = make_params(1, 5, 5, 2);
  const auto sol = dp_solve(params, model);
  REQUIRE(sol.span_history.size() >= 2);
  const std::size_t n = sol.span_history.size();
  for (std::size_t i = n / 2; i + 1 < n; ++i)
    CHECK(sol.span_history[i + 1] <= sol.span_history[i] * 1.01 + 1e-12);
  CHECK(sol.final_span <= 1e-6 * model.mean());
}

TEST_CASE("poisson m=2 average cost matches the reported benchmark") {
  const auto model = DemandModel::poisson(10.0);
  const auto sol = dp_solve(make_params(0, 5, 5, 2), model);
  CHECK(std::fabs(sol.avg_cost - 1.465) / 1.465 <= 0.02);
}

TEST_CASE("poisson m=3 average cost matches the reported benchmark") {
  const auto model = DemandModel::poisson(10.0);
  const auto sol = dp_solve(make_params(1, 5, 5, 3), model);
  CHECK(std::fabs(sol.avg_cost - 4.932) / 4.932 <= 0.02);
}

TEST_CASE("dp beats simulated alternative policies up to noise") {
  const auto model = DemandModel::poisson(10.0);
  const auto params = make_params(1, 10, 5, 2);
  const auto sol = dp_solve(params, model);

  perish::SimConfig cfg;
  cfg.periods = 300'000;
  cfg.burn_in = 10'000;
  cfg.seed = 4242;
  cfg.collect_samples = false;
  const auto dp_stats = simulate(params, model, perish::OrderPolicy{&sol}, cfg);
  for (double q : {12.0, 14.0, 16.0}) {
    const auto cbs_stats = simulate(params, model, perish::OrderPolicy{q}, cfg);
    CHECK(dp_stats.avg_cost <=
          cbs_stats.avg_cost + 3.0 * (dp_stats.se_cost + cbs_stats.se_cost));
  }
}

TEST_CASE("order-amount slice starts at the empty-state level") {
  const auto model = DemandModel::poisson(10.0);
  const auto params = make_params(1, 10, 5, 3);
  const auto sol = dp_solve(params, model);
  const auto slice = dp_order_amounts(sol, 0.0);
  REQUIRE(!slice.empty());
  CHECK(slice[0].first == 0.0);
  CHECK(slice[0].second == sol.order_up_to[0]);
  // Order amounts never become negative along the slice.
  for (const auto& [x, amount] : slice) CHECK(amount >= 0.0);

  // On this near-base-stock instance the recurrent region orders 14 - x:
  // the empty-state level is 14 and the slope is exactly -1 up to it.
  CHECK(sol.order_up_to[0] == 14.0);
  for (const auto& [x, amount] : slice) {
    if (x <= 14.0) CHECK(amount == doctest::Approx(14.0 - x));
  }
}

TEST_CASE("unsupported configurations are rejected loudly") {
  const auto model = DemandModel::poisson(10.0);
  CHECK_THROWS_AS(dp_solve(make_params(1, 10, 5, 4), model), std::invalid_argument);
  CHECK_THROWS_AS(dp_solve(make_params(1, 10, 5, 1), model), std::invalid_argument);
  auto with_lead = make_params(1, 10, 5, 3);
  with_lead.lead_time = 1;
  CHECK_THROWS_AS(dp_solve(with_lead, model), std::invalid_argument);
}

TEST_SUITE_END();
