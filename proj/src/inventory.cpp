#include "perish/inventory.hpp"

#include <stdexcept>

#include "perish/grid.hpp"

namespace perish {

InventoryVector::InventoryVector(std::vector<double> components, double step)
    : comps_(std::move(components)) {
  for (double v : comps_) grid_index_checked(v, step, "inventory component");
}

InventoryVector InventoryVector::zeros(std::size_t n) {
  InventoryVector x;
  x.comps_.assign(n, 0.0);
  return x;
}

double InventoryVector::prefix_sum(std::size_t i) const {
  if (i > comps_.size()) throw std::out_of_range("inventory prefix index out of range");
  double s = 0.0;
  for (std::size_t j = 0; j < i; ++j) s += comps_[j];
  return s;
}

}  // namespace perish
