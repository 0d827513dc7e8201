#pragma once

#include <cstddef>
#include <vector>

namespace perish {

// Initial-inventory vector x = (x_1, ..., x_{m-1}); x_i is the quantity with
// i periods of remaining life. Components are nonnegative and on-grid.
class InventoryVector {
 public:
  InventoryVector() = default;

  // Validates nonnegativity and grid alignment of every component.
  InventoryVector(std::vector<double> components, double step);

  static InventoryVector zeros(std::size_t n);

  std::size_t size() const { return comps_.size(); }
  double operator[](std::size_t i) const { return comps_[i]; }
  const std::vector<double>& components() const { return comps_; }

  // x^i = x_1 + ... + x_i with x^0 = 0.
  double prefix_sum(std::size_t i) const;
  double total() const { return prefix_sum(comps_.size()); }

 private:
  std::vector<double> comps_;
};

}  // namespace perish
