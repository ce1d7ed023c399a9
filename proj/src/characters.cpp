#include "eqop/characters.hpp"

#include <algorithm>

#include "eqop/errors.hpp"

namespace eqop {

CharacterTable character_table(const OperatorBuilder& builder, const GroupSpec& spec, int N) {
  CharacterTable table;
  for (const auto& g : spec.elements()) table.emplace(g, builder(g, N).trace());
  return table;
}

CharacterTable regular_character(const GroupSpec& spec, int N) {
  CharacterTable table;
  for (const auto& g : spec.elements()) table.emplace(g, g.is_identity() ? Complex(N, 0.0) : Complex(0.0, 0.0));
  return table;
}

IsomorphismReport verify_isomorphic(const CharacterTable& a, const CharacterTable& b, double tol) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw ValidationError("character tables are indexed by different group elements");
  }
  IsomorphismReport report;
  report.isomorphic = true;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    const double dev = std::abs(ia->second - ib->second);
    if (report.worst.indices.empty() || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst = ia->first;
    }
    if (!(dev <= tol)) report.isomorphic = false;
  }
  return report;
}

double homomorphism_defect(const OperatorBuilder& builder, const GroupSpec& spec, int N) {
  const auto elements = spec.elements();
  std::vector<Eigen::MatrixXcd> mats;
  mats.reserve(elements.size());
  for (const auto& g : elements) mats.push_back(builder(g, N).to_dense());
  double worst = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = 0; j < elements.size(); ++j) {
      const auto gh = compose(elements[i], elements[j], spec);
      const auto& expected = mats[spec.linear_index(gh)];
      worst = std::max(worst, (mats[i] * mats[j] - expected).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

nlohmann::json character_table_json(const CharacterTable& table) {
  auto out = nlohmann::json::array();
  for (const auto& [g, trace] : table) {
    out.push_back({{"element", g.indices}, {"trace_re", trace.real()}, {"trace_im", trace.imag()}});
  }
  return out;
}

}  // namespace eqop
