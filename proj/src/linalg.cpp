#include "eqop/linalg.hpp"

#include <limits>
#include <string>

#include "eqop/errors.hpp"

namespace eqop::numkit {

namespace {

std::string shape(const ComplexMatrix& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

}  // namespace

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
  if (a.cols() != x.size()) {
    throw DimensionError("matvec: " + shape(a) + " matrix with vector of length " + std::to_string(x.size()));
  }
  return a * x;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: " + shape(a) + " times " + shape(b));
  return a * b;
}

ComplexMatrix conj_transpose(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix mul_real(const ComplexMatrix& a, const Eigen::MatrixXd& x) {
  if (a.cols() != x.rows()) {
    throw DimensionError("mul_real: " + shape(a) + " times " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
  }
  const Eigen::MatrixXd re = a.real(), im = a.imag();
  ComplexMatrix out(a.rows(), x.cols());
  out.real() = re * x;
  out.imag() = im * x;
  return out;
}

ComplexMatrix mul_real_transpose(const ComplexMatrix& g, const Eigen::MatrixXd& x) {
  if (g.cols() != x.cols()) throw DimensionError("mul_real_transpose: column counts differ");
  const Eigen::MatrixXd re = g.real(), im = g.imag();
  ComplexMatrix out(g.rows(), x.rows());
  out.real() = re * x.transpose();
  out.imag() = im * x.transpose();
  return out;
}

bool all_finite(const ComplexMatrix& a) {
  return a.real().allFinite() && a.imag().allFinite();
}

double condition_number(const ComplexMatrix& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

}  // namespace eqop::numkit
