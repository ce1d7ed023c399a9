#include "eqop/group.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "eqop/errors.hpp"

namespace eqop {

namespace {

int mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

void check_orders(const std::vector<int>& orders) {
  if (orders.empty()) throw ValidationError("group needs at least one cyclic factor");
  for (int k : orders) {
    if (k < 1) throw ValidationError("cyclic factor order must be >= 1, got " + std::to_string(k));
  }
}

}  // namespace

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Cyclic: return "cyclic";
    case GroupKind::DirectProduct: return "direct";
    case GroupKind::SemiDirect: return "semidirect";
  }
  return "unknown";
}

GroupKind group_kind_from_string(const std::string& name) {
  if (name == "cyclic") return GroupKind::Cyclic;
  if (name == "direct") return GroupKind::DirectProduct;
  if (name == "semidirect") return GroupKind::SemiDirect;
  throw ValidationError("unknown group kind '" + name + "'");
}

bool GroupElement::is_identity() const {
  return std::all_of(indices.begin(), indices.end(), [](int i) { return i == 0; });
}

std::string to_string(const GroupElement& g) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < g.indices.size(); ++i) os << (i ? "," : "") << g.indices[i];
  os << ')';
  return os.str();
}

GroupSpec::GroupSpec(GroupKind kind, std::vector<int> factors, ActionTable action)
    : kind_(kind), factors_(std::move(factors)), action_(std::move(action)) {}

GroupSpec GroupSpec::cyclic(int order) {
  check_orders({order});
  return GroupSpec(GroupKind::Cyclic, {order}, {});
}

GroupSpec GroupSpec::direct_product(std::vector<int> orders) {
  check_orders(orders);
  return GroupSpec(GroupKind::DirectProduct, std::move(orders), {});
}

GroupSpec GroupSpec::semi_direct(int k, int k_prime, int h_order, ActionTable action) {
  check_orders({k, k_prime, h_order});
  const int a_order = k * k_prime;
  if (static_cast<int>(action.size()) != h_order) {
    throw ValidationError("action table needs one row per rotation index");
  }
  for (const auto& row : action) {
    if (static_cast<int>(row.size()) != a_order) {
      throw ValidationError("action row must map all " + std::to_string(a_order) + " translations");
    }
    std::vector<char> seen(a_order, 0);
    for (int image : row) {
      if (image < 0 || image >= a_order || seen[image]) {
        throw ValidationError("action is not a bijection on the translation group");
      }
      seen[image] = 1;
    }
  }
  // Automorphism: h(a + b) = h(a) + h(b).
  auto add = [&](int a, int b) {
    return mod(a / k_prime + b / k_prime, k) * k_prime + mod(a % k_prime + b % k_prime, k_prime);
  };
  for (const auto& row : action) {
    for (int a = 0; a < a_order; ++a) {
      for (int b = 0; b < a_order; ++b) {
        if (row[add(a, b)] != add(row[a], row[b])) {
          throw ValidationError("action row is not a homomorphism of the translation group");
        }
      }
    }
  }
  // H -> Aut(A) must itself be a homomorphism.
  for (int a = 0; a < a_order; ++a) {
    if (action[0][a] != a) throw ValidationError("rotation index 0 must act as the identity");
  }
  for (int i = 0; i < h_order; ++i) {
    for (int j = 0; j < h_order; ++j) {
      const auto& both = action[mod(i + j, h_order)];
      for (int a = 0; a < a_order; ++a) {
        if (both[a] != action[i][action[j][a]]) {
          throw ValidationError("action is not compatible with the rotation group law");
        }
      }
    }
  }
  return GroupSpec(GroupKind::SemiDirect, {k, k_prime, h_order}, std::move(action));
}

GroupSpec GroupSpec::quarter_turn(int k, int h_order) {
  if (h_order < 1 || 4 % h_order != 0) {
    throw ValidationError("quarter-turn preset needs |H| in {1, 2, 4}");
  }
  check_orders({k});
  const int step = 4 / h_order;
  ActionTable action(h_order, std::vector<int>(k * k));
  for (int j = 0; j < h_order; ++j) {
    for (int x = 0; x < k; ++x) {
      for (int y = 0; y < k; ++y) {
        int u = x, v = y;
        for (int q = 0; q < j * step; ++q) {
          const int nu = mod(-v, k);
          v = u;
          u = nu;
        }
        action[j][x * k + y] = u * k + v;
      }
    }
  }
  return semi_direct(k, k, h_order, std::move(action));
}

int GroupSpec::order() const {
  return std::accumulate(factors_.begin(), factors_.end(), 1, std::multiplies<>());
}

int GroupSpec::translation_order() const {
  if (kind_ != GroupKind::SemiDirect) throw UnsupportedError("translation_order needs a semi-direct group");
  return factors_[0] * factors_[1];
}

int GroupSpec::rotation_order() const {
  if (kind_ != GroupKind::SemiDirect) throw UnsupportedError("rotation_order needs a semi-direct group");
  return factors_[2];
}

std::pair<int, int> GroupSpec::act(int j, int k, int k_prime) const {
  const int kp = factors_[1];
  const int image = action_.at(mod(j, factors_[2]))[mod(k, factors_[0]) * kp + mod(k_prime, kp)];
  return {image / kp, image % kp};
}

bool GroupSpec::contains(const GroupElement& g) const {
  if (g.indices.size() != factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (g.indices[i] < 0 || g.indices[i] >= factors_[i]) return false;
  }
  return true;
}

void GroupSpec::validate(const GroupElement& g) const {
  if (g.indices.size() != factors_.size()) {
    throw ValidationError("element " + to_string(g) + " has " + std::to_string(g.indices.size()) +
                          " indices, group has " + std::to_string(factors_.size()) + " factors");
  }
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (g.indices[i] < 0 || g.indices[i] >= factors_[i]) {
      throw ValidationError("element " + to_string(g) + ": index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(factors_[i]) + ")");
    }
  }
}

GroupElement GroupSpec::identity() const {
  return GroupElement(std::vector<int>(factors_.size(), 0));
}

std::vector<GroupElement> GroupSpec::elements() const {
  std::vector<GroupElement> out;
  out.reserve(order());
  std::vector<int> idx(factors_.size(), 0);
  for (int n = 0; n < order(); ++n) {
    out.emplace_back(idx);
    for (std::size_t i = factors_.size(); i-- > 0;) {
      if (++idx[i] < factors_[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::size_t GroupSpec::linear_index(const GroupElement& g) const {
  validate(g);
  std::size_t n = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) n = n * factors_[i] + g.indices[i];
  return n;
}

GroupElement compose(const GroupElement& g, const GroupElement& h, const GroupSpec& spec) {
  spec.validate(g);
  spec.validate(h);
  const auto& f = spec.factors();
  if (spec.kind() != GroupKind::SemiDirect) {
    std::vector<int> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = (g[i] + h[i]) % f[i];
    return GroupElement(std::move(out));
  }
  // (a1, h1)(a2, h2) = (a1 + h1(a2), h1 h2)
  const auto [u, v] = spec.act(g[2], h[0], h[1]);
  return GroupElement{(g[0] + u) % f[0], (g[1] + v) % f[1], (g[2] + h[2]) % f[2]};
}

GroupElement inverse(const GroupElement& g, const GroupSpec& spec) {
  spec.validate(g);
  const auto& f = spec.factors();
  if (spec.kind() != GroupKind::SemiDirect) {
    std::vector<int> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = mod(-g[i], f[i]);
    return GroupElement(std::move(out));
  }
  // (a, h)^-1 = (h^-1(-a), h^-1)
  const int hinv = mod(-g[2], f[2]);
  const auto [u, v] = spec.act(hinv, mod(-g[0], f[0]), mod(-g[1], f[1]));
  return GroupElement{u, v, hinv};
}

}  // namespace eqop
