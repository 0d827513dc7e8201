#pragma once

namespace perish {

// Economic and structural parameters. The purchase cost c is normalized to
// zero in all experiments; r - c and theta + c are the effective shortage
// (understock) and wastage (overstock) rates.
struct CostParams {
  double c = 0.0;
  double h = 0.0;      // holding, per unit held at end of period
  double r = 0.0;      // shortage, per unit of lost demand
  double theta = 0.0;  // wastage, per unit outdated
  int lifetime = 1;    // m, periods of product life
  int lead_time = 0;   // l, order arrival delay, 0 <= l <= m-1

  double shortage_rate() const { return r - c; }
  double wastage_rate() const { return theta + c; }
  double critical_ratio() const { return shortage_rate() / (h + shortage_rate()); }

  // h >= 0, r-c > 0, theta+c > 0 rule out trivial policies.
  void validate() const;
};

}  // namespace perish
