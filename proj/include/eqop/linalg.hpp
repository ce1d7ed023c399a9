#pragma once

#include <complex>

#include <Eigen/Dense>

namespace eqop::numkit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Dimension-checked products; throw DimensionError on mismatch.
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix conj_transpose(const ComplexMatrix& a);

/// a * x for real x, computed as two real products.
ComplexMatrix mul_real(const ComplexMatrix& a, const Eigen::MatrixXd& x);
/// g * x^T for real x, computed as two real products.
ComplexMatrix mul_real_transpose(const ComplexMatrix& g, const Eigen::MatrixXd& x);

bool all_finite(const ComplexMatrix& a);

/// Ratio of extreme singular values; infinity for a rank-deficient matrix.
double condition_number(const ComplexMatrix& a);

}  // namespace eqop::numkit
