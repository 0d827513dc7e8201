#pragma once

#include <vector>

#include "perish/params.hpp"
#include "perish/simulator.hpp"

namespace perish {

struct CbsOptimum {
  double q_c_star = 0.0;
  double cost = 0.0;
  double se = 0.0;
  std::vector<double> scan_q;     // coarse-scan diagnostics
  std::vector<double> scan_cost;
};

// Minimizes the average base-stock cost h*n_h + (r-c)*n_s + (theta+c)*n_w
// over the precomputed curve grid, then refines around the coarse argmin on
// the model grid with a 10x horizon. The curve points must come from a
// common-random-number scan. Expands the bracket when the argmin lands on a
// boundary; fails if expansion does not help.
CbsOptimum optimize_cbs(const CostParams& params, const DemandModel& model,
                        const std::vector<CurvePoint>& curve, const SimConfig& curve_config,
                        long long refine_periods = 0);

}  // namespace perish
