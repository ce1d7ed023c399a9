#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "eqop/group.hpp"
#include "eqop/image.hpp"
#include "eqop/imaging.hpp"

namespace eqop {

/// x2 = param . x1. `base_id` identifies the source shape for leak-free splits.
struct PairSample {
  ImageGrid x1;
  ImageGrid x2;
  GroupElement param;
  std::uint32_t base_id = 0;
};

/// Base: x1 is the untransformed image. Orbit: x1 runs over every transformed
/// version of the image as well, giving |G|^2 pairs per image.
enum class PairAnchors : std::uint8_t { Base = 0, Orbit = 1 };

struct PairOptions {
  PairAnchors anchors = PairAnchors::Base;
  std::optional<std::size_t> cap;  // uniform subsample, order preserved
  std::uint64_t seed = 0;
};

std::vector<PairSample> build_pairs(const std::vector<ImageGrid>& base, const TransformSpec& transforms,
                                    const PairOptions& options);
/// As above with explicit base ids (ids.size() == base.size()).
std::vector<PairSample> build_pairs(const std::vector<ImageGrid>& base, const std::vector<std::uint32_t>& ids,
                                    const TransformSpec& transforms, const PairOptions& options);

/// Keeps `cap` samples chosen uniformly with `seed`, in their original order.
std::vector<PairSample> subsample(std::vector<PairSample> samples, std::size_t cap, std::uint64_t seed);

struct SplitRatios {
  double test = 0.5;  // of all base shapes
  double val = 0.2;   // of the remainder
};

struct BaseSplit {
  std::vector<std::uint32_t> train, val, test;
};

/// Assigns base ids to splits: floor(test * n) to test, round(val * rest) to
/// validation, the remainder to train. Needs at least 5 ids.
BaseSplit split_bases(std::vector<std::uint32_t> ids, const SplitRatios& ratios, std::uint64_t seed);

struct DatasetBundle {
  std::vector<PairSample> train, val, test;
  TransformSpec transforms;
  std::uint64_t seed = 0;
  nlohmann::json generator;  // provenance: generator parameters

  GroupSpec spec() const { return transforms.group(); }
  int height() const;
  int width() const;
};

DatasetBundle split(std::vector<PairSample> samples, const TransformSpec& transforms, const SplitRatios& ratios,
                    std::uint64_t seed);

struct SplitCaps {
  std::optional<std::size_t> train, val, test;  // pair counts per split
};

/// Splits base images into train/val/test by shape, then builds pairs inside
/// each split (so no shape appears in two splits) and subsamples to the caps.
DatasetBundle build_dataset(const std::vector<ImageGrid>& base, const TransformSpec& transforms,
                            const SplitRatios& ratios, PairAnchors anchors, const SplitCaps& caps,
                            std::uint64_t seed);

/// EQDS container: magic, version, counts, H, W, transform spec, then per
/// sample base id, u16 params, f32 x1 and x2 pixels.
std::vector<std::uint8_t> encode_dataset(const DatasetBundle& data);
DatasetBundle decode_dataset(const std::vector<std::uint8_t>& bytes);

void write_dataset(const DatasetBundle& data, const std::filesystem::path& path);
DatasetBundle read_dataset(const std::filesystem::path& path);

}  // namespace eqop
