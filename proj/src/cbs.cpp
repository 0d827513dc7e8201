#include "perish/cbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perish/grid.hpp"

namespace perish {

namespace {

double point_cost(const CostParams& p, const CurvePoint& c) {
  return p.h * c.n_h + p.shortage_rate() * c.n_s + p.wastage_rate() * c.n_w;
}

double point_se(const CostParams& p, const CurvePoint& c) {
  const double a = p.h * c.se_h;
  const double b = p.shortage_rate() * c.se_s;
  const double d = p.wastage_rate() * c.se_w;
  return std::sqrt(a * a + b * b + d * d);
}

std::size_t argmin_cost(const CostParams& p, const std::vector<CurvePoint>& pts) {
  std::size_t best = 0;
  double best_cost = point_cost(p, pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double c = point_cost(p, pts[i]);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  return best;
}

}  // namespace

CbsOptimum optimize_cbs(const CostParams& params, const DemandModel& model,
                        const std::vector<CurvePoint>& curve, const SimConfig& curve_config,
                        long long refine_periods) {
  params.validate();
  if (curve.empty()) throw std::invalid_argument("cbs optimization requires curve points");

  std::vector<CurvePoint> pts = curve;
  std::size_t best = argmin_cost(params, pts);

  // The average cost is convex in the base-stock level, so an interior argmin
  // certifies the bracket; extend it otherwise.
  int expansions = 0;
  while (best + 1 == pts.size() && expansions < 4) {
    const double lo = pts.back().q_c;
    const double hi = lo + std::max(model.mean(), 10.0 * model.step());
    const double coarse = pts.size() >= 2 ? pts[1].q_c - pts[0].q_c : model.step();
    std::vector<double> ext;
    for (double q = lo + coarse; q <= hi + 1e-9; q += coarse) ext.push_back(q);
    const auto more = wastage_curve(params, model, ext, curve_config);
    pts.insert(pts.end(), more.begin(), more.end());
    best = argmin_cost(params, pts);
    ++expansions;
  }
  if (best + 1 == pts.size())
    throw std::runtime_error("cbs cost argmin stayed on the scan boundary after expansion");

  CbsOptimum out;
  for (const auto& c : pts) {
    out.scan_q.push_back(c.q_c);
    out.scan_cost.push_back(point_cost(params, c));
  }

  // Refinement pass: model-grid resolution around the coarse argmin at a
  // longer horizon, same seed (common random numbers throughout). Widen the
  // window when the refined argmin lands on its edge.
  const double coarse_step =
      pts.size() >= 2 ? std::max(pts[1].q_c - pts[0].q_c, model.step()) : model.step();
  const double center = pts[best].q_c;
  SimConfig refine_cfg = curve_config;
  refine_cfg.periods = refine_periods > 0 ? refine_periods : 10 * curve_config.periods;
  refine_cfg.burn_in = std::max(curve_config.burn_in, refine_cfg.periods / 20);

  double half_width = 1.5 * coarse_step;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double lo = std::max(0.0, center - half_width);
    const double hi = center + half_width;
    std::vector<double> fine;
    for (double q = grid_ceil_value(lo, model.step()); q <= hi + 1e-9; q += model.step())
      fine.push_back(q);
    const auto fine_pts = wastage_curve(params, model, fine, refine_cfg);
    const std::size_t fbest = argmin_cost(params, fine_pts);
    const bool at_edge = (fbest == 0 && fine_pts.front().q_c > 0.0) ||
                         fbest + 1 == fine_pts.size();
    if (at_edge && attempt < 3) {
      half_width += coarse_step;
      continue;
    }
    out.q_c_star = fine_pts[fbest].q_c;
    out.cost = point_cost(params, fine_pts[fbest]);
    out.se = point_se(params, fine_pts[fbest]);
    return out;
  }
  throw std::runtime_error("cbs refinement failed to locate an interior argmin");
}

}  // namespace perish
