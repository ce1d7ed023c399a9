#include "eqop/adam.hpp"

#include <cmath>

#include "eqop/errors.hpp"

namespace eqop::numkit {

AdamState make_adam(const std::vector<const ComplexMatrix*>& params, double lr) {
  AdamState s;
  s.lr = lr;
  for (const auto* p : params) {
    s.m.push_back(ComplexMatrix::Zero(p->rows(), p->cols()));
    s.v.push_back(ComplexMatrix::Zero(p->rows(), p->cols()));
  }
  return s;
}

void adam_step(const std::vector<ComplexMatrix*>& params, const std::vector<const ComplexMatrix*>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
    throw DimensionError("adam: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i]->rows() || params[i]->cols() != grads[i]->cols() ||
        state.m[i].rows() != params[i]->rows() || state.m[i].cols() != params[i]->cols()) {
      throw DimensionError("adam: shape mismatch for parameter " + std::to_string(i));
    }
  }
  state.lr = lr;
  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Complex* p = params[i]->data();
    const Complex* g = grads[i]->data();
    Complex* m = state.m[i].data();
    Complex* v = state.v[i].data();
    const Eigen::Index n = params[i]->size();
    for (Eigen::Index e = 0; e < n; ++e) {
      const double gr = g[e].real(), gi = g[e].imag();
      const double mr = b1 * m[e].real() + (1 - b1) * gr;
      const double mi = b1 * m[e].imag() + (1 - b1) * gi;
      const double vr = b2 * v[e].real() + (1 - b2) * gr * gr;
      const double vi = b2 * v[e].imag() + (1 - b2) * gi * gi;
      m[e] = {mr, mi};
      v[e] = {vr, vi};
      const double ur = (mr / c1) / (std::sqrt(vr / c2) + state.eps);
      const double ui = (mi / c1) / (std::sqrt(vi / c2) + state.eps);
      p[e] -= Complex(lr * ur, lr * ui);
    }
  }
}

}  // namespace eqop::numkit
