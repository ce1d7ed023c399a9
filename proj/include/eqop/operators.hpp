#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqop/group.hpp"

namespace eqop {

using Complex = std::complex<double>;

enum class OperatorForm : std::uint8_t { PermutationBlock = 0, ComplexDiagonal = 1, DenseComplex = 2 };

/// A representation matrix psi(g) acting on latent codes of dimension N.
///
/// Three storage forms are supported. A permutation is stored as source
/// indices: (psi z)[i] = z[source[i]].
class LatentOperator {
 public:
  static LatentOperator permutation(std::vector<std::uint32_t> source, int block, GroupElement g);
  static LatentOperator diagonal(Eigen::VectorXcd entries, GroupElement g);
  static LatentOperator dense(Eigen::MatrixXcd matrix, GroupElement g);

  OperatorForm form() const { return form_; }
  int dim() const { return dim_; }
  const GroupElement& element() const { return element_; }
  /// Cycle length for the permutation-block form, 0 otherwise.
  int block() const { return block_; }

  const std::vector<std::uint32_t>& source() const { return source_; }
  const Eigen::VectorXcd& diagonal() const { return diagonal_; }
  const Eigen::MatrixXcd& matrix() const { return dense_; }

  Eigen::MatrixXcd to_dense() const;
  Complex trace() const;

  /// psi applied to every column of z, in place.
  void apply_inplace(Eigen::Ref<Eigen::MatrixXcd> z) const;
  /// psi^H applied to every column of z, in place.
  void apply_adjoint_inplace(Eigen::Ref<Eigen::MatrixXcd> z) const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const;
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& z) const;

 private:
  LatentOperator() = default;

  OperatorForm form_ = OperatorForm::DenseComplex;
  int dim_ = 0;
  int block_ = 0;
  GroupElement element_;
  std::vector<std::uint32_t> source_;
  Eigen::VectorXcd diagonal_;
  Eigen::MatrixXcd dense_;
};

/// Block-diagonal N/K copies of M^k, M the cyclic shift by one. Requires K | N.
LatentOperator shift_operator_perm(int K, int N, int k);

/// Diagonal omega^(k * (n mod K)), omega = exp(2 pi i / K). The last cycle is
/// truncated when K does not divide N.
LatentOperator shift_operator_complex(int K, int N, int k);

/// Planar rotation by 2 pi k / K on the first two latents, identity elsewhere.
LatentOperator disentangled_operator(int K, int N, int k);

/// N/(K K') repetitions of diag(omega_1^(k i) omega_2^(k' j)), j fastest.
LatentOperator tensor_product_operator(int K, int K_prime, int N, int k, int k_prime);

/// Character index (x1, y1) of Z_K x Z_K'.
using CharacterIndex = std::pair<int, int>;

/// Lexicographically smallest representative of every non-trivial H-orbit on
/// the characters of the translation subgroup. Needs odd K and K'.
std::vector<CharacterIndex> orbit_representatives(const GroupSpec& spec);

/// The full H-orbit of a character, ordered by rotation index m: entry m is
/// the character a -> chi(h_0^-m (a)).
std::vector<CharacterIndex> character_orbit(const GroupSpec& spec, CharacterIndex chi);

/// Induced representation of the semi-direct group, repeated N/(|A||H|) times.
LatentOperator induced_rep_operator(const GroupSpec& spec, const GroupElement& g, int N);

/// Degrees of the irreducible representations assembled by induced_rep_operator:
/// |H| ones followed by (|A|-1)/|H| copies of |H|.
std::vector<int> induced_rep_degrees(const GroupSpec& spec);

/// The permutation reordering a product of x-shift and y-shift latents into the
/// tensor-product layout, repeated N/(K K') times.
Eigen::MatrixXd analytic_L1_translations(int K, int K_prime, int N);

struct FourierConjugation {
  Eigen::MatrixXcd B;  // B_rc = exp(-2 pi i r c / |H|)
  Eigen::MatrixXcd C;  // C_rc = exp(+2 pi i r c / |H|)
};

FourierConjugation fourier_conjugation_matrices(int h_order);

/// Coset permutation P_h for h = h_0^j with representatives h_i = h_0^i:
/// column i holds a 1 in row (i + j) mod |H|.
Eigen::MatrixXd rotation_permutation(int h_order, int j);

}  // namespace eqop
