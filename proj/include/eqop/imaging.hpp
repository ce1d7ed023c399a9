#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqop/group.hpp"
#include "eqop/image.hpp"

namespace eqop {

/// out(r, c) = in((r - dy) mod H, (c - dx) mod W).
ImageGrid translate_periodic(const ImageGrid& x, int dx, int dy);

enum class RotationMethod : std::uint8_t { Exact90 = 0, Bilinear = 1 };

std::string to_string(RotationMethod m);
RotationMethod rotation_method_from_string(const std::string& name);

/// Counter-clockwise rotation by 360 j / K degrees about the image center.
/// Exact90 needs K in {1, 2, 4}; Bilinear fills with 0 outside the source.
ImageGrid rotate(const ImageGrid& x, int j, int K, RotationMethod method);

/// Random closed 5-point polylines rasterized with Bresenham lines of value 1.
/// Points are drawn from the central 22 x 22 region. Image i only depends on
/// (seed, i).
std::vector<ImageGrid> gen_shapes(int count, std::uint64_t seed, int size = 28);

/// Rasterize the segment (r0, c0) -> (r1, c1) with value 1.
void draw_line(ImageGrid& img, int r0, int c0, int r1, int c1);

/// The transformations applied to a dataset: rotation, then x-translation,
/// then y-translation. Factors with order 1 are dropped from the group.
struct TransformSpec {
  int rotations = 1;
  int tx = 1;
  int ty = 1;
  RotationMethod method = RotationMethod::Bilinear;

  /// Exact90 when the rotation order divides 4, else Bilinear.
  static TransformSpec make(int rotations, int tx, int ty);

  /// Orders of the active factors in application order.
  std::vector<int> orders() const;
  /// Roles of the active factors: 'r', 'x' or 'y'.
  std::string roles() const;
  /// Cyclic for one active factor, otherwise the direct product of the orders
  /// used as a parameter space (the image action is not claimed to compose).
  GroupSpec group() const;

  ImageGrid apply(const ImageGrid& x, const GroupElement& g) const;

  bool operator==(const TransformSpec&) const = default;
};

}  // namespace eqop
