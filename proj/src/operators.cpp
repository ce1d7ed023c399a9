#include "eqop/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eqop/errors.hpp"

namespace eqop {

namespace {

int mod(long long a, int m) {
  const long long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

/// exp(2 pi i p / q), exact on the axes.
Complex root_of_unity(long long p, int q) {
  const int r = mod(p, q);
  if (r == 0) return {1.0, 0.0};
  if (2 * r == q) return {-1.0, 0.0};
  if (4 * r == q) return {0.0, 1.0};
  if (4 * r == 3 * q) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * r / q;
  return {std::cos(angle), std::sin(angle)};
}

void require_index(int k, int K, const char* what) {
  if (K < 1) throw ValidationError(std::string(what) + ": order must be >= 1");
  if (k < 0 || k >= K) {
    throw ValidationError(std::string(what) + ": index " + std::to_string(k) + " out of range [0, " +
                          std::to_string(K) + ")");
  }
}

void require_odd_semidirect(const GroupSpec& spec) {
  if (spec.kind() != GroupKind::SemiDirect) {
    throw UnsupportedError("induced representation needs a semi-direct group");
  }
  const int K = spec.factors()[0];
  const int Kp = spec.factors()[1];
  if (K < 3 || Kp < 3 || K % 2 == 0 || Kp % 2 == 0) {
    throw UnsupportedError("induced representation needs odd K, K' >= 3 (got K=" + std::to_string(K) +
                           ", K'=" + std::to_string(Kp) + ")");
  }
}

Complex character(CharacterIndex chi, int K, int Kp, int k, int kp) {
  // exp(2 pi i (x1 k / K + y1 k' / K')) over the common denominator K K'.
  const long long num = static_cast<long long>(chi.first) * k * Kp + static_cast<long long>(chi.second) * kp * K;
  return root_of_unity(num, K * Kp);
}

}  // namespace

LatentOperator LatentOperator::permutation(std::vector<std::uint32_t> source, int block, GroupElement g) {
  const auto n = static_cast<int>(source.size());
  if (block < 1 || n % block != 0) throw DimensionError("permutation block must divide the dimension");
  for (int b = 0; b < n; b += block) {
    std::vector<char> seen(block, 0);
    for (int i = b; i < b + block; ++i) {
      const auto s = static_cast<int>(source[i]);
      if (s < b || s >= b + block || seen[s - b]) {
        throw ValidationError("permutation-block operator needs one unit entry per row and column of each block");
      }
      seen[s - b] = 1;
    }
  }
  LatentOperator op;
  op.form_ = OperatorForm::PermutationBlock;
  op.dim_ = n;
  op.block_ = block;
  op.element_ = std::move(g);
  op.source_ = std::move(source);
  return op;
}

LatentOperator LatentOperator::diagonal(Eigen::VectorXcd entries, GroupElement g) {
  for (Eigen::Index i = 0; i < entries.size(); ++i) {
    if (std::abs(std::abs(entries[i]) - 1.0) > 1e-12) {
      throw ValidationError("complex-diagonal operator entries must have modulus 1");
    }
  }
  LatentOperator op;
  op.form_ = OperatorForm::ComplexDiagonal;
  op.dim_ = static_cast<int>(entries.size());
  op.element_ = std::move(g);
  op.diagonal_ = std::move(entries);
  return op;
}

LatentOperator LatentOperator::dense(Eigen::MatrixXcd matrix, GroupElement g) {
  if (matrix.rows() != matrix.cols()) throw DimensionError("dense operator must be square");
  LatentOperator op;
  op.form_ = OperatorForm::DenseComplex;
  op.dim_ = static_cast<int>(matrix.rows());
  op.element_ = std::move(g);
  op.dense_ = std::move(matrix);
  return op;
}

Eigen::MatrixXcd LatentOperator::to_dense() const {
  switch (form_) {
    case OperatorForm::PermutationBlock: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) m(i, source_[i]) = 1.0;
      return m;
    }
    case OperatorForm::ComplexDiagonal:
      return diagonal_.asDiagonal();
    case OperatorForm::DenseComplex:
      return dense_;
  }
  return {};
}

Complex LatentOperator::trace() const {
  switch (form_) {
    case OperatorForm::PermutationBlock: {
      double fixed = 0;
      for (int i = 0; i < dim_; ++i) fixed += (source_[i] == static_cast<std::uint32_t>(i)) ? 1.0 : 0.0;
      return {fixed, 0.0};
    }
    case OperatorForm::ComplexDiagonal:
      return diagonal_.sum();
    case OperatorForm::DenseComplex:
      return dense_.trace();
  }
  return {};
}

void LatentOperator::apply_inplace(Eigen::Ref<Eigen::MatrixXcd> z) const {
  if (z.rows() != dim_) throw DimensionError("operator dimension does not match latent rows");
  switch (form_) {
    case OperatorForm::PermutationBlock: {
      const Eigen::MatrixXcd copy = z;
      for (int i = 0; i < dim_; ++i) z.row(i) = copy.row(source_[i]);
      break;
    }
    case OperatorForm::ComplexDiagonal:
      z = diagonal_.asDiagonal() * z;
      break;
    case OperatorForm::DenseComplex: {
      const Eigen::MatrixXcd out = dense_ * z;
      z = out;
      break;
    }
  }
}

void LatentOperator::apply_adjoint_inplace(Eigen::Ref<Eigen::MatrixXcd> z) const {
  if (z.rows() != dim_) throw DimensionError("operator dimension does not match latent rows");
  switch (form_) {
    case OperatorForm::PermutationBlock: {
      const Eigen::MatrixXcd copy = z;
      for (int i = 0; i < dim_; ++i) z.row(source_[i]) = copy.row(i);
      break;
    }
    case OperatorForm::ComplexDiagonal:
      z = diagonal_.conjugate().asDiagonal() * z;
      break;
    case OperatorForm::DenseComplex: {
      const Eigen::MatrixXcd out = dense_.adjoint() * z;
      z = out;
      break;
    }
  }
}

Eigen::VectorXcd LatentOperator::apply(const Eigen::VectorXcd& z) const {
  Eigen::MatrixXcd m = z;
  apply_inplace(m);
  return m.col(0);
}

Eigen::VectorXcd LatentOperator::apply_adjoint(const Eigen::VectorXcd& z) const {
  Eigen::MatrixXcd m = z;
  apply_adjoint_inplace(m);
  return m.col(0);
}

LatentOperator shift_operator_perm(int K, int N, int k) {
  require_index(k, K, "shift_operator_perm");
  if (N < 1 || N % K != 0) {
    throw DimensionError("shift_operator_perm: K=" + std::to_string(K) + " does not divide N=" + std::to_string(N));
  }
  std::vector<std::uint32_t> source(N);
  for (int i = 0; i < N; ++i) {
    const int base = i - i % K;
    source[i] = static_cast<std::uint32_t>(base + mod(i % K - k, K));
  }
  return LatentOperator::permutation(std::move(source), K, GroupElement{k});
}

LatentOperator shift_operator_complex(int K, int N, int k) {
  require_index(k, K, "shift_operator_complex");
  if (N < 1) throw DimensionError("shift_operator_complex: N must be >= 1");
  Eigen::VectorXcd d(N);
  for (int n = 0; n < N; ++n) d[n] = root_of_unity(static_cast<long long>(k) * (n % K), K);
  return LatentOperator::diagonal(std::move(d), GroupElement{k});
}

LatentOperator disentangled_operator(int K, int N, int k) {
  require_index(k, K, "disentangled_operator");
  if (N < 2) throw DimensionError("disentangled_operator: N must be >= 2");
  const Complex r = root_of_unity(k, K);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(N, N);
  m(0, 0) = r.real();
  m(0, 1) = -r.imag();
  m(1, 0) = r.imag();
  m(1, 1) = r.real();
  return LatentOperator::dense(std::move(m), GroupElement{k});
}

LatentOperator tensor_product_operator(int K, int K_prime, int N, int k, int k_prime) {
  require_index(k, K, "tensor_product_operator");
  require_index(k_prime, K_prime, "tensor_product_operator");
  const int cycle = K * K_prime;
  if (N < 1 || N % cycle != 0) {
    throw DimensionError("tensor_product_operator: K*K'=" + std::to_string(cycle) + " does not divide N=" +
                         std::to_string(N));
  }
  Eigen::VectorXcd d(N);
  for (int n = 0; n < N; ++n) {
    const int i = (n % cycle) / K_prime;
    const int j = (n % cycle) % K_prime;
    // omega_1^(k i) omega_2^(k' j) = exp(2 pi i (k i K' + k' j K) / (K K'))
    d[n] = root_of_unity(static_cast<long long>(k) * i * K_prime + static_cast<long long>(k_prime) * j * K, cycle);
  }
  return LatentOperator::diagonal(std::move(d), GroupElement{k, k_prime});
}

std::vector<CharacterIndex> character_orbit(const GroupSpec& spec, CharacterIndex chi) {
  if (spec.kind() != GroupKind::SemiDirect) throw UnsupportedError("character orbits need a semi-direct group");
  const int K = spec.factors()[0];
  const int Kp = spec.factors()[1];
  const int H = spec.factors()[2];
  std::vector<CharacterIndex> orbit;
  orbit.reserve(H);
  for (int m = 0; m < H; ++m) {
    // chi o h^-m evaluated on the generators fixes the new character index.
    const auto [u1, v1] = spec.act(mod(-m, H), 1, 0);
    const auto [u2, v2] = spec.act(mod(-m, H), 0, 1);
    const long long nx = static_cast<long long>(chi.first) * u1 * Kp + static_cast<long long>(chi.second) * v1 * K;
    const long long ny = static_cast<long long>(chi.first) * u2 * Kp + static_cast<long long>(chi.second) * v2 * K;
    if (nx % Kp != 0 || ny % K != 0) {
      throw InconsistencyError("rotation action does not map characters of Z_K x Z_K' to characters");
    }
    orbit.emplace_back(mod(nx / Kp, K), mod(ny / K, Kp));
  }
  return orbit;
}

std::vector<CharacterIndex> orbit_representatives(const GroupSpec& spec) {
  require_odd_semidirect(spec);
  const int K = spec.factors()[0];
  const int Kp = spec.factors()[1];
  const int H = spec.factors()[2];
  const int A = K * Kp;
  if ((A - 1) % H != 0) {
    throw InconsistencyError("(|A|-1) = " + std::to_string(A - 1) + " is not divisible by |H| = " + std::to_string(H));
  }
  std::vector<char> assigned(A, 0);
  assigned[0] = 1;
  std::vector<CharacterIndex> reps;
  for (int x = 0; x < K; ++x) {
    for (int y = 0; y < Kp; ++y) {
      if (assigned[x * Kp + y]) continue;
      const auto orbit = character_orbit(spec, {x, y});
      for (std::size_t m = 1; m < orbit.size(); ++m) {
        if (orbit[m] == orbit[0]) {
          throw InconsistencyError("character (" + std::to_string(x) + "," + std::to_string(y) +
                                   ") has a non-trivial stabilizer");
        }
      }
      for (const auto& c : orbit) {
        const int idx = c.first * Kp + c.second;
        if (assigned[idx]) throw InconsistencyError("H-orbits on characters overlap");
        assigned[idx] = 1;
      }
      reps.emplace_back(x, y);
    }
  }
  if (static_cast<int>(reps.size()) * H != A - 1) {
    throw InconsistencyError("orbit count does not match (|A|-1)/|H|");
  }
  return reps;
}

std::vector<int> induced_rep_degrees(const GroupSpec& spec) {
  const auto reps = orbit_representatives(spec);
  const int H = spec.rotation_order();
  std::vector<int> degrees(H, 1);
  degrees.insert(degrees.end(), reps.size(), H);
  return degrees;
}

Eigen::MatrixXd rotation_permutation(int h_order, int j) {
  require_index(j, h_order, "rotation_permutation");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(h_order, h_order);
  for (int i = 0; i < h_order; ++i) p((i + j) % h_order, i) = 1.0;
  return p;
}

LatentOperator induced_rep_operator(const GroupSpec& spec, const GroupElement& g, int N) {
  require_odd_semidirect(spec);
  spec.validate(g);
  const int K = spec.factors()[0];
  const int Kp = spec.factors()[1];
  const int H = spec.factors()[2];
  const int size = K * Kp * H;
  if (N < 1 || N % size != 0) {
    throw DimensionError("induced_rep_operator: |A||H|=" + std::to_string(size) + " does not divide N=" +
                         std::to_string(N));
  }
  const auto reps = orbit_representatives(spec);
  const int k = g[0], kp = g[1], j = g[2];

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(size, size);
  for (int n = 0; n < H; ++n) rho(n, n) = root_of_unity(static_cast<long long>(n) * j, H);

  const Eigen::MatrixXcd p = rotation_permutation(H, j).cast<Complex>();
  int offset = H;
  for (const auto& r : reps) {
    const auto orbit = character_orbit(spec, r);
    Eigen::VectorXcd m(H);
    for (int i = 0; i < H; ++i) m[i] = character(orbit[i], K, Kp, k, kp);
    const Eigen::MatrixXcd blk = m.asDiagonal() * p;
    for (int copy = 0; copy < H; ++copy, offset += H) rho.block(offset, offset, H, H) = blk;
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  for (int b = 0; b < N; b += size) out.block(b, b, size, size) = rho;
  return LatentOperator::dense(std::move(out), g);
}

Eigen::MatrixXd analytic_L1_translations(int K, int K_prime, int N) {
  if (K < 1 || K_prime < 1) throw ValidationError("analytic_L1_translations: orders must be >= 1");
  const int cycle = K * K_prime;
  if (N < 1 || N % cycle != 0) {
    throw DimensionError("analytic_L1_translations: K*K'=" + std::to_string(cycle) + " does not divide N=" +
                         std::to_string(N));
  }
  // Column c = i + m K (phase index i of the x-shift) goes to row i K' + m.
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(N, N);
  for (int b = 0; b < N; b += cycle) {
    for (int i = 0; i < K; ++i) {
      for (int m = 0; m < K_prime; ++m) p(b + i * K_prime + m, b + i + m * K) = 1.0;
    }
  }
  return p;
}

FourierConjugation fourier_conjugation_matrices(int h_order) {
  if (h_order < 1) throw ValidationError("fourier_conjugation_matrices: |H| must be >= 1");
  FourierConjugation fc{Eigen::MatrixXcd(h_order, h_order), Eigen::MatrixXcd(h_order, h_order)};
  for (int r = 0; r < h_order; ++r) {
    for (int c = 0; c < h_order; ++c) {
      fc.B(r, c) = root_of_unity(-static_cast<long long>(r) * c, h_order);
      fc.C(r, c) = root_of_unity(static_cast<long long>(r) * c, h_order);
    }
  }
  return fc;
}

}  // namespace eqop
