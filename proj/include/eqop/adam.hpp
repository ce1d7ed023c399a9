#pragma once

#include <vector>

#include "eqop/linalg.hpp"

namespace eqop::numkit {

/// Adam with bias correction. Real and imaginary parts are independent real
/// parameters: moments are stored component-wise in a complex matrix.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 1e-3;
  long step = 0;
  std::vector<ComplexMatrix> m;
  std::vector<ComplexMatrix> v;
};

AdamState make_adam(const std::vector<const ComplexMatrix*>& params, double lr);

void adam_step(const std::vector<ComplexMatrix*>& params, const std::vector<const ComplexMatrix*>& grads,
               AdamState& state, double lr);

}  // namespace eqop::numkit
