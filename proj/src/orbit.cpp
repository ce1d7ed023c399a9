#include "eqop/orbit.hpp"

#include <algorithm>

namespace eqop {

std::vector<ImageGrid> orbit(const ImageGrid& x, const ImageAction& action, const GroupSpec& spec, double dedup_tol) {
  std::vector<ImageGrid> distinct;
  for (const auto& g : spec.elements()) {
    ImageGrid y = action(x, g);
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](const ImageGrid& d) { return linf_distance(d, y) <= dedup_tol; });
    if (!seen) distinct.push_back(std::move(y));
  }
  return distinct;
}

}  // namespace eqop
