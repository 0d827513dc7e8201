#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perish/demand.hpp"
#include "perish/params.hpp"
#include "perish/simulator.hpp"

namespace perish {

// Run configuration loaded from a sectioned key=value file. Unknown sections
// or keys are rejected; every constraint on the demand and cost blocks is
// revalidated on load.
struct RunConfig {
  // [demand]
  std::string demand_kind = "poisson";
  double demand_mean = 10.0;
  std::vector<double> demand_values;
  std::vector<double> demand_probs;
  double demand_step = -1.0;  // default: 0.1 exponential, 1 discrete

  // [cost]
  double h = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double c = 0.0;

  // [structure]
  int m = 1;
  int l = 0;

  // [simulation]
  long long periods = 1'000'000;
  long long burn_in = 10'000;
  std::uint64_t seed = 12345;
  long long sample_stride = 100;

  // [solver]
  double root_tol = 1e-6;
  double delta = -1.0;  // finite-difference step; default by demand kind
  double alpha = 0.01;
  long long curve_periods = 1000;
  long long curve_burn_in = 200;
  long long refine_periods = 0;    // 0: 10x curve_periods
  long long wex_periods = 100'000;
  long long wex_burn_in = 10'000;
  double table_bound = -1.0;       // component bound; default from tau and bounds
  double qc_scan_max = -1.0;       // default from the demand quantiles
  bool reuse_zero_leadtime_qc = false;
  bool wex_reestimate = false;     // experimental one-step re-estimation under q_h*

  // [output]
  std::string out_dir = "out";

  DemandModel demand() const;
  CostParams costs() const;
  SimConfig sim_config() const;
  SimConfig curve_config() const;
  void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace perish
