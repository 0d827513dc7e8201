#include "perish/params.hpp"

#include <stdexcept>
#include <string>

namespace perish {

void CostParams::validate() const {
  if (h < 0.0) throw std::invalid_argument("holding cost h must be >= 0");
  if (!(r - c > 0.0)) throw std::invalid_argument("shortage rate r - c must be > 0");
  if (!(theta + c > 0.0)) throw std::invalid_argument("wastage rate theta + c must be > 0");
  if (lifetime < 1) throw std::invalid_argument("lifetime m must be >= 1");
  if (lead_time < 0 || lead_time > lifetime - 1)
    throw std::invalid_argument("lead time l must satisfy 0 <= l <= m-1, got l=" +
                                std::to_string(lead_time) + " with m=" +
                                std::to_string(lifetime));
}

}  // namespace perish
