#include "eqop/params.hpp"

#include "eqop/errors.hpp"

namespace eqop {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Shift: return "shift";
    case Variant::Disentangled: return "disentangled";
    case Variant::Weak: return "weak";
    case Variant::Stacked: return "stacked";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "shift") return Variant::Shift;
  if (name == "disentangled") return Variant::Disentangled;
  if (name == "weak") return Variant::Weak;
  if (name == "stacked") return Variant::Stacked;
  throw ValidationError("unknown model variant '" + name + "'");
}

std::vector<numkit::ComplexMatrix*> ModelParams::tensors() {
  std::vector<numkit::ComplexMatrix*> out{&encoder, &decoder};
  for (auto& m : intermediates) out.push_back(&m);
  return out;
}

std::vector<const numkit::ComplexMatrix*> ModelParams::tensors() const {
  std::vector<const numkit::ComplexMatrix*> out{&encoder, &decoder};
  for (const auto& m : intermediates) out.push_back(&m);
  return out;
}

}  // namespace eqop
