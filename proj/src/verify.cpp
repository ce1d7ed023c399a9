#include "eqop/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "eqop/characters.hpp"
#include "eqop/operators.hpp"

namespace eqop {

namespace {

constexpr double kTol = 1e-9;

CheckResult make(std::string name, double deviation, double tol) {
  return CheckResult{std::move(name), deviation <= tol, deviation, tol};
}

double axiom_violations(const GroupSpec& spec) {
  const auto els = spec.elements();
  const auto e = spec.identity();
  double bad = 0;
  for (const auto& a : els) {
    if (compose(e, a, spec) != a || compose(a, e, spec) != a) ++bad;
    if (!compose(a, inverse(a, spec), spec).is_identity()) ++bad;
    for (const auto& b : els) {
      const auto ab = compose(a, b, spec);
      if (!spec.contains(ab)) ++bad;
      for (const auto& c : els) {
        if (compose(ab, c, spec) != compose(a, compose(b, c, spec), spec)) ++bad;
      }
    }
  }
  return bad;
}

double character_deviation(const OperatorBuilder& builder, const GroupSpec& spec, int N) {
  return verify_isomorphic(character_table(builder, spec, N), regular_character(spec, N), 0.0).max_deviation;
}

std::string shape(const std::vector<int>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "x" : "") + std::to_string(f[i]);
  return s;
}

}  // namespace

std::vector<CheckResult> run_theory_checks(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  const auto fits = [&](int order) { return order <= options.max_order; };

  std::vector<GroupSpec> groups;
  for (int K = 2; K <= 12; ++K) groups.push_back(GroupSpec::cyclic(K));
  for (auto f : std::vector<std::vector<int>>{{2, 3}, {3, 3}, {2, 5}, {3, 5}, {5, 5}}) {
    groups.push_back(GroupSpec::direct_product(f));
  }
  groups.push_back(GroupSpec::quarter_turn(3, 2));
  groups.push_back(GroupSpec::quarter_turn(3, 4));
  groups.push_back(GroupSpec::quarter_turn(5, 4));
  for (const auto& spec : groups) {
    if (!fits(spec.order()) || spec.order() > 200) continue;
    out.push_back(make("group axioms " + to_string(spec.kind()) + " " + shape(spec.factors()),
                       axiom_violations(spec), 0.0));
  }

  // Shift operators: regular character and homomorphism.
  for (int K = 2; K <= 12; ++K) {
    if (!fits(K)) continue;
    const GroupSpec spec = GroupSpec::cyclic(K);
    const int N = 4 * K;
    const OperatorBuilder perm = [K](const GroupElement& g, int n) { return shift_operator_perm(K, n, g[0]); };
    const OperatorBuilder complex = [K, &options](const GroupElement& g, int n) {
      LatentOperator op = shift_operator_complex(K, n, g[0]);
      if (options.inject_sign_fault && g[0] == 1) return LatentOperator::dense(-op.to_dense(), g);
      return op;
    };
    const std::string k = " K=" + std::to_string(K) + " N=" + std::to_string(N);
    out.push_back(make("shift perm character" + k, character_deviation(perm, spec, N), kTol));
    out.push_back(make("shift complex character" + k, character_deviation(complex, spec, N), kTol));
    out.push_back(make("shift perm homomorphism" + k, homomorphism_defect(perm, spec, N), kTol));
    out.push_back(make("shift complex homomorphism" + k, homomorphism_defect(complex, spec, N), kTol));
  }

  // The 2x2 rotation block is not the regular representation.
  if (fits(10)) {
    const int K = 10, N = 800;
    const GroupSpec spec = GroupSpec::cyclic(K);
    const OperatorBuilder dis = [K](const GroupElement& g, int n) { return disentangled_operator(K, n, g[0]); };
    const double dev = character_deviation(dis, spec, N);
    CheckResult c{"disentangled character differs from regular K=10 N=800", dev >= N - 4 - kTol, dev,
                  static_cast<double>(N - 4)};
    out.push_back(c);
    out.push_back(make("disentangled homomorphism K=10 N=8", homomorphism_defect(dis, spec, 8), kTol));
  }

  // Tensor products of x and y shifts.
  for (int K : {2, 3, 5}) {
    for (int Kp : {2, 3, 5}) {
      if (!fits(K * Kp)) continue;
      const GroupSpec spec = GroupSpec::direct_product({K, Kp});
      const int N = K * Kp;
      const OperatorBuilder tp = [K, Kp](const GroupElement& g, int n) {
        return tensor_product_operator(K, Kp, n, g[0], g[1]);
      };
      const std::string k = " K=" + std::to_string(K) + " K'=" + std::to_string(Kp);
      out.push_back(make("tensor product character" + k, character_deviation(tp, spec, N), kTol));
      out.push_back(make("tensor product homomorphism" + k, homomorphism_defect(tp, spec, N), kTol));

      // psi_y P psi_x = T P for the analytic reordering P.
      const Eigen::MatrixXcd P = analytic_L1_translations(K, Kp, N).cast<Complex>();
      double dev = 0.0;
      for (int k = 0; k < K; ++k) {
        for (int kp = 0; kp < Kp; ++kp) {
          const Eigen::MatrixXcd lhs =
              shift_operator_complex(Kp, N, kp).to_dense() * P * shift_operator_complex(K, N, k).to_dense();
          const Eigen::MatrixXcd rhs = tensor_product_operator(K, Kp, N, k, kp).to_dense() * P;
          dev = std::max(dev, (lhs - rhs).cwiseAbs().maxCoeff());
        }
      }
      out.push_back(make("analytic translation layer psi_y P psi_x = T P" + k, dev, 1e-12));
    }
  }

  // Induced representation of the semi-direct product.
  for (auto [K, H] : std::vector<std::pair<int, int>>{{3, 2}, {3, 4}, {5, 4}}) {
    const GroupSpec spec = GroupSpec::quarter_turn(K, H);
    if (!fits(spec.order())) continue;
    const int N = spec.order();
    const OperatorBuilder ind = [&spec](const GroupElement& g, int n) { return induced_rep_operator(spec, g, n); };
    const std::string k = " K=K'=" + std::to_string(K) + " |H|=" + std::to_string(H);
    out.push_back(make("induced rep homomorphism" + k, homomorphism_defect(ind, spec, N), kTol));
    out.push_back(make("induced rep character" + k, character_deviation(ind, spec, N), kTol));

    const auto degrees = induced_rep_degrees(spec);
    int sum = 0;
    for (int d : degrees) sum += d * d;
    out.push_back(make("degree sum" + k, std::abs(sum - spec.order()), 0.0));

    // Representatives: one per orbit, orbits partition the non-trivial characters.
    const auto reps = orbit_representatives(spec);
    std::set<CharacterIndex> seen;
    double bad = std::abs(static_cast<double>(reps.size()) - (spec.translation_order() - 1.0) / H);
    for (const auto& r : reps) {
      const auto orb = character_orbit(spec, r);
      for (const auto& c : std::set<CharacterIndex>(orb.begin(), orb.end())) {
        if (!seen.insert(c).second) ++bad;
      }
    }
    if (static_cast<int>(seen.size()) != spec.translation_order() - 1 || seen.count({0, 0})) ++bad;
    out.push_back(make("orbit representatives partition" + k, bad, 0.0));
  }

  // P_h = (1/|H|) B psi_h C.
  for (int H : {1, 2, 4, 8}) {
    if (!fits(H)) continue;
    const auto bc = fourier_conjugation_matrices(H);
    double dev = 0.0;
    for (int j = 0; j < H; ++j) {
      const Eigen::MatrixXcd lhs = bc.B * shift_operator_complex(H, H, j).to_dense() * bc.C / static_cast<double>(H);
      dev = std::max(dev, (lhs - rotation_permutation(H, j).cast<Complex>()).cwiseAbs().maxCoeff());
    }
    out.push_back(make("Fourier conjugation P_h = B psi C / |H| for |H|=" + std::to_string(H), dev, 1e-12));
  }

  const auto topo = topology_demo();
  out.push_back(CheckResult{"topology demo orbit sizes 1, 1, 3", topo.pass, topo.pass ? 0.0 : 1.0, 0.0});
  return out;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::string s;
  char buf[64];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, " (deviation %.3g, tolerance %.3g)\n", c.max_deviation, c.tolerance);
    s += (c.pass ? "PASS " : "FAIL ") + c.name + buf;
  }
  return s;
}

}  // namespace eqop
