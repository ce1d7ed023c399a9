#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace eqop {

enum class GroupKind : std::uint8_t { Cyclic = 0, DirectProduct = 1, SemiDirect = 2 };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& name);

/// One transformation: an index per cyclic factor. The identity is all zeros.
struct GroupElement {
  std::vector<int> indices;

  GroupElement() = default;
  explicit GroupElement(std::vector<int> idx) : indices(std::move(idx)) {}
  GroupElement(std::initializer_list<int> idx) : indices(idx) {}

  bool is_identity() const;
  std::size_t size() const { return indices.size(); }
  int operator[](std::size_t i) const { return indices[i]; }

  auto operator<=>(const GroupElement&) const = default;
  bool operator==(const GroupElement&) const = default;
};

std::string to_string(const GroupElement& g);

/// A finite group built from cyclic factors.
///
/// Semi-direct groups are (Z_K x Z_K') x| Z_|H| with factors ordered (K, K', |H|)
/// and elements written (k, k', j). The action is a lookup table: `action[j][a]`
/// is the image of translation index a = k * K' + k' under h_0^j.
class GroupSpec {
 public:
  using ActionTable = std::vector<std::vector<int>>;

  static GroupSpec cyclic(int order);
  static GroupSpec direct_product(std::vector<int> orders);
  static GroupSpec semi_direct(int k, int k_prime, int h_order, ActionTable action);
  /// Rotations by multiples of 90 degrees acting on square translations,
  /// (k, k') -> (-k' mod K, k) per quarter turn. |H| must divide 4.
  static GroupSpec quarter_turn(int k, int h_order);

  GroupKind kind() const { return kind_; }
  const std::vector<int>& factors() const { return factors_; }
  const ActionTable& action() const { return action_; }
  std::size_t factor_count() const { return factors_.size(); }
  int order() const;

  // Semi-direct accessors.
  int translation_order() const;  // |A| = K * K'
  int rotation_order() const;     // |H|
  /// h_0^j applied to the translation (k, k').
  std::pair<int, int> act(int j, int k, int k_prime) const;

  bool contains(const GroupElement& g) const;
  /// Throws ValidationError if g is not an element of this group.
  void validate(const GroupElement& g) const;

  GroupElement identity() const;
  /// All elements in lexicographic order, last index fastest.
  std::vector<GroupElement> elements() const;
  std::size_t linear_index(const GroupElement& g) const;

  bool operator==(const GroupSpec&) const = default;

 private:
  GroupSpec(GroupKind kind, std::vector<int> factors, ActionTable action);

  GroupKind kind_ = GroupKind::Cyclic;
  std::vector<int> factors_;
  ActionTable action_;
};

GroupElement compose(const GroupElement& g, const GroupElement& h, const GroupSpec& spec);
GroupElement inverse(const GroupElement& g, const GroupSpec& spec);

}  // namespace eqop
