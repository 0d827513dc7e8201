#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perish/rng.hpp"

namespace perish {

enum class DemandKind { Exponential, Poisson, Finite };

// One-period i.i.d. demand distribution realized on a uniform grid.
// Exponential demand uses the 0.1 step; Poisson and finite kinds live on an
// integer-multiple grid (step 1 by default). Immutable after construction and
// safe to share; generator state is owned by the caller.
class DemandModel {
 public:
  static DemandModel exponential(double mean, double step = 0.1);
  static DemandModel poisson(double mean);
  static DemandModel finite(std::vector<double> values, std::vector<double> probs,
                            double step = 1.0);

  DemandKind kind() const { return kind_; }
  bool discrete() const { return kind_ != DemandKind::Exponential; }
  double step() const { return step_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  // Smallest grid point whose one-period survival mass is <= 1e-9.
  double grid_max() const { return grid_max_; }

  // Closed-form CDF (exponential) or exact cumulative mass (discrete kinds).
  // No grid interpolation. Throws on negative z.
  double cdf(double z) const;

  // 1 - cdf(z) without cancellation in the tail.
  double survival(double z) const;

  // Smallest grid-representable z with cdf(z) >= p; full-precision inverse
  // for the exponential kind. Requires 0 <= p < 1.
  double quantile(double p) const;

  // One draw. Exponential by closed-form inversion, Poisson by search
  // inversion (split into sub-draws above mean 30), finite by cumulative
  // lookup. Reproducible given the generator state.
  double sample(Rng& rng) const;

  // Probability weights on grid indices 0..n-1.
  // Centered: mass of [k*s - s/2, k*s + s/2) at k (convolution quadrature).
  // Left:     mass of [k*s, (k+1)*s) at k (dynamic-programming grid).
  // Discrete kinds return the exact pmf for both. fold_tail adds the mass
  // beyond the window to the last cell.
  std::vector<double> cell_pmf_centered(std::size_t n) const;
  std::vector<double> cell_pmf_left(std::size_t n, bool fold_tail) const;

  // Stable identifier used in cache keys and output metadata.
  std::string id() const;

 private:
  DemandModel() = default;

  DemandKind kind_ = DemandKind::Finite;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double step_ = 1.0;
  double grid_max_ = 0.0;
  std::vector<double> values_;  // finite kind, sorted ascending
  std::vector<double> probs_;
  std::vector<double> cum_;
};

}  // namespace perish
