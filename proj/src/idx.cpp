#include "eqop/idx.hpp"

#include "eqop/binary_io.hpp"
#include "eqop/errors.hpp"

namespace eqop {

std::vector<ImageGrid> parse_idx_images(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader in(bytes);
  const std::size_t magic_at = in.offset();
  const auto magic = in.u32_be();
  if (magic != 0x00000803u) throw ParseError("not an IDX image file", magic_at);
  const auto count = in.u32_be();
  const auto rows = in.u32_be();
  const auto cols = in.u32_be();
  if (rows == 0 || cols == 0) throw ParseError("IDX image dimensions must be positive", in.offset() - 8);
  const std::size_t per_image = static_cast<std::size_t>(rows) * cols;
  if (in.remaining() < per_image * count) {
    throw ParseError("IDX image payload truncated: header declares " + std::to_string(count) + " images",
                     in.offset() + (in.remaining() / per_image) * per_image);
  }
  std::vector<ImageGrid> images;
  images.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto* p = in.take(per_image, "IDX pixels");
    std::vector<double> px(per_image);
    for (std::size_t i = 0; i < per_image; ++i) px[i] = p[i] / 255.0;
    images.emplace_back(static_cast<int>(rows), static_cast<int>(cols), std::move(px));
  }
  return images;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader in(bytes);
  const auto magic = in.u32_be();
  if (magic != 0x00000801u) throw ParseError("not an IDX label file", 0);
  const auto count = in.u32_be();
  const auto* p = in.take(count, "IDX labels");
  return {p, p + count};
}

IdxData load_idx(const std::filesystem::path& images_path, const std::optional<std::filesystem::path>& labels_path) {
  IdxData data;
  data.images = parse_idx_images(io::read_file(images_path));
  if (labels_path) {
    data.labels = parse_idx_labels(io::read_file(*labels_path));
    if (data.labels.size() != data.images.size()) {
      throw ParseError("label count " + std::to_string(data.labels.size()) + " does not match image count " +
                           std::to_string(data.images.size()),
                       4);
    }
  }
  return data;
}

}  // namespace eqop
