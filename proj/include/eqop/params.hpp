#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqop/linalg.hpp"

namespace eqop {

enum class Variant : std::uint8_t { Shift = 0, Disentangled = 1, Weak = 2, Stacked = 3 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Trainable weights of a linear autoencoder with latent operators.
struct ModelParams {
  Variant variant = Variant::Shift;
  numkit::ComplexMatrix encoder;                     // latent x pixel
  numkit::ComplexMatrix decoder;                     // pixel x latent
  std::vector<numkit::ComplexMatrix> intermediates;  // latent x latent, between stacked operators

  int latent_dim() const { return static_cast<int>(encoder.rows()); }
  int pixel_dim() const { return static_cast<int>(encoder.cols()); }

  /// encoder, decoder, intermediates... in that order.
  std::vector<numkit::ComplexMatrix*> tensors();
  std::vector<const numkit::ComplexMatrix*> tensors() const;

  bool operator==(const ModelParams&) const = default;
};

}  // namespace eqop
