#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "eqop/characters.hpp"
#include "eqop/errors.hpp"
#include "eqop/imaging.hpp"
#include "eqop/operator_io.hpp"
#include "eqop/operators.hpp"
#include "eqop/orbit.hpp"

using namespace eqop;
using Eigen::MatrixXcd;

namespace {

Complex omega(double p, double q) { return std::polar(1.0, 2.0 * std::numbers::pi * p / q); }

// Cyclic shift by one (e_i -> e_{i+1}), block-repeated, raised to k.
MatrixXcd shift_oracle(int K, int N, int k) {
  MatrixXcd m = MatrixXcd::Zero(K, K);
  for (int i = 0; i < K; ++i) m((i + 1) % K, i) = 1.0;
  MatrixXcd mk = MatrixXcd::Identity(K, K);
  for (int s = 0; s < k; ++s) mk = m * mk;
  MatrixXcd out = MatrixXcd::Zero(N, N);
  for (int b = 0; b < N; b += K) out.block(b, b, K, K) = mk;
  return out;
}

double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("shift_operator_perm") {
  CHECK(shift_operator_perm(4, 8, 0).trace() == Complex(8, 0));
  CHECK(max_abs(shift_operator_perm(4, 8, 0).to_dense() - MatrixXcd::Identity(8, 8)) == 0.0);
  CHECK(std::abs(shift_operator_perm(4, 8, 1).trace()) == 0.0);
  for (int k = 0; k < 4; ++k) CHECK(max_abs(shift_operator_perm(4, 8, k).to_dense() - shift_oracle(4, 8, k)) == 0.0);
  // M^4 = I
  const MatrixXcd m = shift_operator_perm(4, 8, 1).to_dense();
  CHECK(max_abs(m * m * m * m - MatrixXcd::Identity(8, 8)) == 0.0);
  // psi_k psi_k' = psi_{k+k'}
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const MatrixXcd prod = shift_operator_perm(4, 8, a).to_dense() * shift_operator_perm(4, 8, b).to_dense();
      CHECK(max_abs(prod - shift_operator_perm(4, 8, (a + b) % 4).to_dense()) == 0.0);
    }
  }
  CHECK_THROWS_AS(shift_operator_perm(3, 8, 1), DimensionError);
  CHECK_THROWS_AS(shift_operator_perm(4, 8, 4), ValidationError);
  CHECK(shift_operator_perm(4, 8, 1).form() == OperatorForm::PermutationBlock);
}

TEST_CASE("shift_operator_complex") {
  const auto op = shift_operator_complex(10, 20, 1);
  CHECK(std::abs(op.diagonal()[1] - omega(1, 10)) < 1e-15);
  CHECK(std::abs(shift_operator_complex(10, 20, 3).trace()) < 1e-9);
  CHECK(std::abs(shift_operator_complex(10, 20, 0).trace() - Complex(20, 0)) == 0.0);
  // K does not divide N: truncated last cycle.
  Complex t2 = 0, t1 = 0;
  for (int n = 0; n < 6; ++n) {
    t2 += std::pow(Complex(0, 1), 2 * (n % 4));
    t1 += std::pow(Complex(0, 1), n % 4);
  }
  CHECK(std::abs(shift_operator_complex(4, 6, 2).trace() - t2) < 1e-12);
  CHECK(std::abs(shift_operator_complex(4, 6, 2).trace()) < 1e-12);
  CHECK(std::abs(shift_operator_complex(4, 6, 1).trace() - Complex(1, 1)) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(shift_operator_complex(4, 6, k).trace()) < 4.0);
  const auto unit_op = shift_operator_complex(7, 30, 3);
  for (const auto& v : unit_op.diagonal()) CHECK(std::abs(std::abs(v) - 1.0) < 1e-15);
  CHECK_THROWS_AS(LatentOperator::diagonal(Eigen::VectorXcd::Constant(3, 2.0), GroupElement{0}), ValidationError);
}

TEST_CASE("disentangled_operator") {
  CHECK(max_abs(disentangled_operator(10, 5, 0).to_dense() - MatrixXcd::Identity(5, 5)) == 0.0);
  const MatrixXcd m = disentangled_operator(4, 4, 1).to_dense();
  MatrixXcd expected = MatrixXcd::Identity(4, 4);
  expected(0, 0) = 0;
  expected(0, 1) = -1;
  expected(1, 0) = 1;
  expected(1, 1) = 0;
  CHECK(max_abs(m - expected) < 1e-15);
  CHECK(std::abs(disentangled_operator(4, 4, 1).trace() - Complex(2, 0)) < 1e-15);
  CHECK_THROWS_AS(disentangled_operator(4, 1, 1), DimensionError);

  const auto table = character_table([](const GroupElement& g, int n) { return disentangled_operator(10, n, g[0]); },
                                     GroupSpec::cyclic(10), 800);
  for (const auto& [g, tr] : table) {
    CHECK(std::abs(tr - Complex(798 + 2 * std::cos(2 * std::numbers::pi * g[0] / 10), 0)) < 1e-9);
  }
}

TEST_CASE("tensor_product_operator") {
  CHECK(max_abs(tensor_product_operator(2, 3, 6, 0, 0).to_dense() - MatrixXcd::Identity(6, 6)) == 0.0);
  const auto d = tensor_product_operator(2, 3, 6, 1, 1).diagonal();
  const Complex w1 = omega(1, 2), w2 = omega(1, 3);
  const Complex expected[6] = {1.0, w2, w2 * w2, w1, w1 * w2, w1 * w2 * w2};
  for (int n = 0; n < 6; ++n) CHECK(std::abs(d[n] - expected[n]) < 1e-15);
  for (int k = 0; k < 5; ++k) {
    for (int kp = 0; kp < 5; ++kp) {
      const Complex tr = tensor_product_operator(5, 5, 25, k, kp).trace();
      CHECK(std::abs(tr - Complex(k == 0 && kp == 0 ? 25 : 0, 0)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(tensor_product_operator(2, 3, 9, 0, 0), DimensionError);
}

TEST_CASE("orbit_representatives") {
  const auto s3 = GroupSpec::quarter_turn(3, 4);
  const auto reps = orbit_representatives(s3);
  CHECK(reps.size() == 2);
  std::set<CharacterIndex> covered;
  for (const auto& r : reps) {
    const auto orbit = character_orbit(s3, r);
    CHECK(orbit.size() == 4);
    CHECK(orbit.front() == r);
    // Lexicographically smallest in its orbit.
    for (const auto& c : orbit) CHECK(!(c < r));
    for (const auto& c : orbit) CHECK(covered.insert(c).second);
    // Action-closed: the orbit of any member is the same set.
    const auto again = character_orbit(s3, orbit[1]);
    CHECK(std::set<CharacterIndex>(again.begin(), again.end()) == std::set<CharacterIndex>(orbit.begin(), orbit.end()));
  }
  CHECK(covered.size() == 8);
  CHECK(!covered.count({0, 0}));

  CHECK(orbit_representatives(GroupSpec::quarter_turn(5, 4)).size() == 6);
  CHECK_THROWS_AS(orbit_representatives(GroupSpec::quarter_turn(4, 4)), UnsupportedError);
  CHECK_THROWS_AS(orbit_representatives(GroupSpec::cyclic(5)), UnsupportedError);
}

TEST_CASE("induced representation") {
  const auto spec = GroupSpec::quarter_turn(3, 4);
  const int N = 36;
  CHECK(max_abs(induced_rep_operator(spec, spec.identity(), N).to_dense() - MatrixXcd::Identity(N, N)) == 0.0);
  std::vector<MatrixXcd> mats;
  for (const auto& g : spec.elements()) {
    mats.push_back(induced_rep_operator(spec, g, N).to_dense());
    if (!g.is_identity()) CHECK(std::abs(mats.back().trace()) < 1e-9);
  }
  // Exhaustive homomorphism check.
  double worst = 0.0;
  const auto els = spec.elements();
  for (std::size_t i = 0; i < els.size(); ++i) {
    for (std::size_t j = 0; j < els.size(); ++j) {
      const auto& expected = mats[spec.linear_index(compose(els[i], els[j], spec))];
      worst = std::max(worst, max_abs(mats[i] * mats[j] - expected));
    }
  }
  CHECK(worst < 1e-9);
  // Unitary.
  for (const auto& m : mats) CHECK(max_abs(m * m.adjoint() - MatrixXcd::Identity(N, N)) < 1e-12);
  // Repeated blocks for N = 72.
  const MatrixXcd big = induced_rep_operator(spec, {1, 2, 3}, 72).to_dense();
  CHECK(max_abs(big.block(36, 36, 36, 36) - mats[spec.linear_index({1, 2, 3})]) == 0.0);

  CHECK_THROWS_AS(induced_rep_operator(spec, spec.identity(), 30), DimensionError);
  CHECK_THROWS_AS(induced_rep_operator(GroupSpec::quarter_turn(4, 4), {0, 0, 0}, 64), UnsupportedError);
}

TEST_CASE("degree sum") {
  for (auto [K, H] : std::vector<std::pair<int, int>>{{3, 2}, {3, 4}, {5, 2}, {5, 4}, {7, 2}, {7, 4}}) {
    const auto spec = GroupSpec::quarter_turn(K, H);
    int sum = 0;
    for (int d : induced_rep_degrees(spec)) sum += d * d;
    CHECK(sum == spec.order());
    CHECK(H + (K * K - 1) / H * H * H == spec.order());
  }
}

TEST_CASE("character tables and isomorphism") {
  const auto z10 = GroupSpec::cyclic(10);
  const OperatorBuilder perm = [](const GroupElement& g, int n) { return shift_operator_perm(10, n, g[0]); };
  const OperatorBuilder cplx = [](const GroupElement& g, int n) { return shift_operator_complex(10, n, g[0]); };
  const OperatorBuilder dis = [](const GroupElement& g, int n) { return disentangled_operator(10, n, g[0]); };
  const auto tp = character_table(perm, z10, 800);
  const auto tc = character_table(cplx, z10, 800);
  const auto td = character_table(dis, z10, 800);
  CHECK(tp.at({0}) == Complex(800, 0));
  for (int k = 1; k < 10; ++k) CHECK(std::abs(tp.at({k})) == 0.0);
  CHECK(verify_isomorphic(tp, regular_character(z10, 800), 1e-9).isomorphic);
  CHECK(verify_isomorphic(tp, tc, 1e-9).isomorphic);
  CHECK(verify_isomorphic(tp, tp, 0.0).isomorphic);
  const auto rep = verify_isomorphic(tp, td, 1e-9);
  CHECK_FALSE(rep.isomorphic);
  CHECK(rep.max_deviation >= 796 - 1e-9);
  CHECK(std::abs(tp.at({5}) - td.at({5})) >= 796 - 1e-9);
  CHECK(rep.worst == GroupElement{1});
  CHECK_THROWS_AS(verify_isomorphic(tp, regular_character(GroupSpec::cyclic(9), 800), 1e-9), ValidationError);

  // Image-space action: 3-pixel cyclic translation.
  const auto z3 = GroupSpec::cyclic(3);
  const auto t3 = character_table([](const GroupElement& g, int n) { return shift_operator_perm(3, n, g[0]); }, z3, 3);
  CHECK(t3.at({0}) == Complex(3, 0));
  CHECK(t3.at({1}) == Complex(0, 0));
  CHECK(t3.at({2}) == Complex(0, 0));

  // Class functions: constant on conjugacy classes of the semi-direct group.
  const auto spec = GroupSpec::quarter_turn(3, 4);
  const auto ti = character_table([&](const GroupElement& g, int n) { return induced_rep_operator(spec, g, n); },
                                  spec, 36);
  for (const auto& g : spec.elements()) {
    for (const auto& h : spec.elements()) {
      const auto conj = compose(compose(h, g, spec), inverse(h, spec), spec);
      CHECK(std::abs(ti.at(g) - ti.at(conj)) < 1e-9);
    }
  }
  const auto j = character_table_json(t3);
  CHECK(j.size() == 3);
  CHECK(j[0]["trace_re"].get<double>() == 3.0);
}

TEST_CASE("homomorphism defect detects corruption") {
  const auto z4 = GroupSpec::cyclic(4);
  CHECK(homomorphism_defect([](const GroupElement& g, int n) { return shift_operator_complex(4, n, g[0]); }, z4, 8) <
        1e-12);
  const OperatorBuilder bad = [](const GroupElement& g, int n) {
    auto op = shift_operator_complex(4, n, g[0]);
    return g[0] == 1 ? LatentOperator::dense(-op.to_dense(), g) : op;
  };
  CHECK(homomorphism_defect(bad, z4, 8) > 1.0);
}

TEST_CASE("analytic translation layer") {
  CHECK(analytic_L1_translations(1, 1, 3).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  for (auto [K, Kp, N] : std::vector<std::tuple<int, int, int>>{{2, 3, 6}, {5, 5, 25}, {3, 2, 12}}) {
    const MatrixXcd P = analytic_L1_translations(K, Kp, N).cast<Complex>();
    CHECK(max_abs(P * P.transpose() - MatrixXcd::Identity(N, N)) == 0.0);
    for (int k = 0; k < K; ++k) {
      for (int kp = 0; kp < Kp; ++kp) {
        const MatrixXcd lhs = shift_operator_complex(Kp, N, kp).to_dense() * P * shift_operator_complex(K, N, k).to_dense();
        const MatrixXcd rhs = tensor_product_operator(K, Kp, N, k, kp).to_dense() * P;
        CHECK(max_abs(lhs - rhs) < 1e-12);
      }
    }
  }
  // No single matrix L satisfies psi_y L psi_x = T for all (k, k'): (0, 0)
  // forces L = I, which fails at (1, 0).
  const int K = 2, Kp = 3, N = 6;
  const MatrixXcd forced = tensor_product_operator(K, Kp, N, 0, 0).to_dense();
  CHECK(max_abs(forced - MatrixXcd::Identity(N, N)) == 0.0);
  const MatrixXcd at10 = shift_operator_complex(Kp, N, 0).to_dense() * forced * shift_operator_complex(K, N, 1).to_dense();
  CHECK(max_abs(at10 - tensor_product_operator(K, Kp, N, 1, 0).to_dense()) > 1.0);
  CHECK_THROWS_AS(analytic_L1_translations(2, 3, 9), DimensionError);
}

TEST_CASE("Fourier conjugation matrices") {
  const auto one = fourier_conjugation_matrices(1);
  CHECK(one.B(0, 0) == Complex(1, 0));
  CHECK(one.C(0, 0) == Complex(1, 0));
  for (int H : {1, 2, 4, 8}) {
    const auto fc = fourier_conjugation_matrices(H);
    CHECK(max_abs(fc.B * fc.C / static_cast<double>(H) - MatrixXcd::Identity(H, H)) < 1e-12);
    for (int j = 0; j < H; ++j) {
      // Oracle: the cyclic permutation sending coset i to coset i + j.
      MatrixXcd p = MatrixXcd::Zero(H, H);
      for (int i = 0; i < H; ++i) p((i + j) % H, i) = 1.0;
      const MatrixXcd lhs = fc.B * shift_operator_complex(H, H, j).to_dense() * fc.C / static_cast<double>(H);
      CHECK(max_abs(lhs - p) < 1e-12);
      CHECK(max_abs(rotation_permutation(H, j).cast<Complex>() - p) == 0.0);
    }
  }
}

TEST_CASE("orbit sizes") {
  const auto z3 = GroupSpec::cyclic(3);
  const ImageAction shift = [](const ImageGrid& x, const GroupElement& g) { return translate_periodic(x, g[0], 0); };
  CHECK(orbit(ImageGrid(1, 3, {0, 0, 0}), shift, z3, 0.0).size() == 1);
  CHECK(orbit(ImageGrid(1, 3, {1, 0, 0}), shift, z3, 0.0).size() == 3);
  CHECK(orbit(ImageGrid(1, 3, {0.5, 0.5, 0.5}), shift, z3, 0.0).size() == 1);

  // Orbit-stabilizer on random periodic images.
  const auto z6 = GroupSpec::cyclic(6);
  std::mt19937_64 rng(7);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> px(6);
    const int period = std::vector<int>{1, 2, 3, 6}[trial % 4];
    for (int i = 0; i < 6; ++i) px[i] = i < period ? bit(rng) : px[i - period];
    const auto o = orbit(ImageGrid(1, 6, px), shift, z6, 1e-12);
    CHECK(6 % o.size() == 0);
  }
}

TEST_CASE("operator serialization round trip") {
  const std::vector<std::pair<LatentOperator, std::vector<int>>> cases{
      {shift_operator_perm(4, 8, 3), {4}},
      {shift_operator_complex(5, 7, 2), {5}},
      {disentangled_operator(6, 4, 1), {6}},
      {tensor_product_operator(2, 3, 6, 1, 2), {2, 3}},
  };
  for (const auto& [op, factors] : cases) {
    const auto bytes = encode_operator(op, factors);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EQOP");
    const auto back = decode_operator(bytes);
    CHECK(back.factors == factors);
    CHECK(back.op.form() == op.form());
    CHECK(back.op.element() == op.element());
    CHECK(max_abs(back.op.to_dense() - op.to_dense()) == 0.0);
  }
  auto bytes = encode_operator(shift_operator_perm(4, 8, 1), {4});
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_operator(bad), ParseError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_operator(bad), ParseError);
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_operator(bad), ParseError);
  // A payload that is not a permutation.
  bad = bytes;
  bad[bad.size() - 4] = 0;
  CHECK_THROWS_AS(decode_operator(bad), ParseError);
  CHECK_THROWS_AS(encode_operator(shift_operator_perm(4, 8, 1), {4, 2}), ValidationError);
}

TEST_CASE("adjoint application") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  Eigen::VectorXcd z(12);
  for (auto& v : z) v = {n01(rng), n01(rng)};
  for (const auto& op : {shift_operator_perm(4, 12, 3), shift_operator_complex(5, 12, 2), disentangled_operator(7, 12, 3)}) {
    const MatrixXcd d = op.to_dense();
    CHECK((op.apply(z) - d * z).norm() < 1e-12);
    CHECK((op.apply_adjoint(z) - d.adjoint() * z).norm() < 1e-12);
  }
}
