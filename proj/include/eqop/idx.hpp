#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "eqop/image.hpp"

namespace eqop {

struct IdxData {
  std::vector<ImageGrid> images;
  std::vector<std::uint8_t> labels;  // empty when no label file was given
};

/// Images from IDX bytes (magic 0x00000803); pixels are scaled by 1/255.
std::vector<ImageGrid> parse_idx_images(const std::vector<std::uint8_t>& bytes);
/// Labels from IDX bytes (magic 0x00000801).
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

IdxData load_idx(const std::filesystem::path& images_path,
                 const std::optional<std::filesystem::path>& labels_path = std::nullopt);

}  // namespace eqop
