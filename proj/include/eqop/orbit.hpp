#pragma once

#include <functional>
#include <vector>

#include "eqop/group.hpp"
#include "eqop/image.hpp"

namespace eqop {

using ImageAction = std::function<ImageGrid(const ImageGrid&, const GroupElement&)>;

/// Distinct images among {g . x : g in G}; two images are the same when their
/// L-infinity distance is <= dedup_tol. Order follows spec.elements().
std::vector<ImageGrid> orbit(const ImageGrid& x, const ImageAction& action, const GroupSpec& spec, double dedup_tol);

}  // namespace eqop
