#pragma once

#include <functional>
#include <map>

#include <json.hpp>

#include "eqop/group.hpp"
#include "eqop/operators.hpp"

namespace eqop {

using CharacterTable = std::map<GroupElement, Complex>;

/// Builds the latent operator for one group element at latent dimension N.
using OperatorBuilder = std::function<LatentOperator(const GroupElement&, int N)>;

/// Trace of builder(g, N) for every g in spec.
CharacterTable character_table(const OperatorBuilder& builder, const GroupSpec& spec, int N);

/// The regular-representation character: N at the identity, 0 elsewhere.
CharacterTable regular_character(const GroupSpec& spec, int N);

struct IsomorphismReport {
  bool isomorphic = false;
  double max_deviation = 0.0;
  GroupElement worst;
};

/// Compares two character tables entry-wise. Throws ValidationError when the
/// key sets differ.
IsomorphismReport verify_isomorphic(const CharacterTable& a, const CharacterTable& b, double tol);

/// max |op(g) op(h) - op(g h)| over all pairs, entry-wise.
double homomorphism_defect(const OperatorBuilder& builder, const GroupSpec& spec, int N);

/// [{"element": [...], "trace_re": x, "trace_im": y}, ...]
nlohmann::json character_table_json(const CharacterTable& table);

}  // namespace eqop
