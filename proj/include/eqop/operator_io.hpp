#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eqop/operators.hpp"

namespace eqop {

struct StoredOperator {
  LatentOperator op;
  std::vector<int> factors;  // cyclic orders of the group the element belongs to
};

/// EQOP container: magic, version, form, N, factor orders, element indices,
/// then the payload (block length and u32 source indices, or f64 re/im pairs
/// of the diagonal, or of the dense matrix in row-major order).
std::vector<std::uint8_t> encode_operator(const LatentOperator& op, const std::vector<int>& factors);
StoredOperator decode_operator(const std::vector<std::uint8_t>& bytes);

void write_operator(const LatentOperator& op, const std::vector<int>& factors, const std::filesystem::path& path);
StoredOperator read_operator(const std::filesystem::path& path);

}  // namespace eqop
