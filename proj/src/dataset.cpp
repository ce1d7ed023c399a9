#include "eqop/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "eqop/binary_io.hpp"
#include "eqop/errors.hpp"

namespace eqop {

namespace {

constexpr std::uint16_t kDatasetVersion = 1;

std::vector<std::size_t> choose(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<PairSample> build_pairs(const std::vector<ImageGrid>& base, const TransformSpec& transforms,
                                    const PairOptions& options) {
  std::vector<std::uint32_t> ids(base.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return build_pairs(base, ids, transforms, options);
}

std::vector<PairSample> build_pairs(const std::vector<ImageGrid>& base, const std::vector<std::uint32_t>& ids,
                                    const TransformSpec& transforms, const PairOptions& options) {
  if (ids.size() != base.size()) throw ValidationError("build_pairs: one base id per image required");
  const auto elements = transforms.group().elements();
  const std::size_t n_el = elements.size();
  const bool orbit = options.anchors == PairAnchors::Orbit;
  const std::size_t per_image = orbit ? n_el * n_el : n_el;
  const std::size_t total = base.size() * per_image;
  // Pick the capped indices first; only the kept pairs are rendered.
  std::vector<std::size_t> picks;
  if (options.cap && *options.cap < total) {
    picks = choose(total, *options.cap, options.seed);
  } else {
    picks.resize(total);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
  }
  std::vector<PairSample> out;
  out.reserve(picks.size());
  std::size_t anchor_key = total;
  ImageGrid x1;
  for (std::size_t i : picks) {
    const std::size_t b = i / per_image, r = i % per_image;
    const std::size_t key = orbit ? i / n_el : b;
    if (key != anchor_key) {
      x1 = orbit ? transforms.apply(base[b], elements[r / n_el]) : base[b];
      anchor_key = key;
    }
    const auto& g = elements[orbit ? r % n_el : r];
    out.push_back({x1, transforms.apply(x1, g), g, ids[b]});
  }
  return out;
}

std::vector<PairSample> subsample(std::vector<PairSample> samples, std::size_t cap, std::uint64_t seed) {
  if (cap >= samples.size()) return samples;
  std::vector<PairSample> kept;
  kept.reserve(cap);
  for (std::size_t i : choose(samples.size(), cap, seed)) kept.push_back(std::move(samples[i]));
  return kept;
}

BaseSplit split_bases(std::vector<std::uint32_t> ids, const SplitRatios& ratios, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 5) throw ValidationError("split needs at least 5 base shapes, got " + std::to_string(ids.size()));
  if (!(ratios.test > 0 && ratios.test < 1 && ratios.val >= 0 && ratios.val < 1)) {
    throw ValidationError("split ratios must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::size_t n = ids.size();
  const auto n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(n)));
  const std::size_t rest = n - n_test;
  auto n_val = static_cast<std::size_t>(std::llround(ratios.val * static_cast<double>(rest)));
  n_val = std::min(n_val, rest - 1);

  BaseSplit s;
  s.test.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test),
               ids.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  s.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), ids.end());
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

int DatasetBundle::height() const {
  for (const auto* v : {&train, &val, &test}) {
    if (!v->empty()) return v->front().x1.height();
  }
  return 0;
}

int DatasetBundle::width() const {
  for (const auto* v : {&train, &val, &test}) {
    if (!v->empty()) return v->front().x1.width();
  }
  return 0;
}

DatasetBundle split(std::vector<PairSample> samples, const TransformSpec& transforms, const SplitRatios& ratios,
                    std::uint64_t seed) {
  std::vector<std::uint32_t> ids;
  ids.reserve(samples.size());
  for (const auto& s : samples) ids.push_back(s.base_id);
  const BaseSplit parts = split_bases(std::move(ids), ratios, seed);
  const std::set<std::uint32_t> test(parts.test.begin(), parts.test.end());
  const std::set<std::uint32_t> val(parts.val.begin(), parts.val.end());

  DatasetBundle bundle;
  bundle.transforms = transforms;
  bundle.seed = seed;
  for (auto& s : samples) {
    auto& dst = test.count(s.base_id) ? bundle.test : val.count(s.base_id) ? bundle.val : bundle.train;
    dst.push_back(std::move(s));
  }
  return bundle;
}

DatasetBundle build_dataset(const std::vector<ImageGrid>& base, const TransformSpec& transforms,
                            const SplitRatios& ratios, PairAnchors anchors, const SplitCaps& caps,
                            std::uint64_t seed) {
  std::vector<std::uint32_t> all(base.size());
  std::iota(all.begin(), all.end(), 0u);
  const BaseSplit parts = split_bases(all, ratios, seed);

  DatasetBundle bundle;
  bundle.transforms = transforms;
  bundle.seed = seed;
  const std::vector<std::uint32_t>* ids[3] = {&parts.train, &parts.val, &parts.test};
  std::vector<PairSample>* dst[3] = {&bundle.train, &bundle.val, &bundle.test};
  const std::optional<std::size_t> cap[3] = {caps.train, caps.val, caps.test};
  for (int s = 0; s < 3; ++s) {
    std::vector<ImageGrid> imgs;
    for (auto id : *ids[s]) imgs.push_back(base[id]);
    PairOptions opt{anchors, cap[s], seed + 1 + static_cast<std::uint64_t>(s)};
    *dst[s] = build_pairs(imgs, *ids[s], transforms, opt);
  }
  return bundle;
}

std::vector<std::uint8_t> encode_dataset(const DatasetBundle& data) {
  io::ByteWriter out;
  out.tag("EQDS");
  out.u16(kDatasetVersion);
  out.u32(static_cast<std::uint32_t>(data.train.size()));
  out.u32(static_cast<std::uint32_t>(data.val.size()));
  out.u32(static_cast<std::uint32_t>(data.test.size()));
  const int H = data.height(), W = data.width();
  out.u32(static_cast<std::uint32_t>(H));
  out.u32(static_cast<std::uint32_t>(W));
  out.u16(static_cast<std::uint16_t>(data.transforms.rotations));
  out.u16(static_cast<std::uint16_t>(data.transforms.tx));
  out.u16(static_cast<std::uint16_t>(data.transforms.ty));
  out.u8(static_cast<std::uint8_t>(data.transforms.method));
  const auto arity = data.transforms.orders().size();
  out.u8(static_cast<std::uint8_t>(arity));
  for (const auto* split : {&data.train, &data.val, &data.test}) {
    for (const auto& s : *split) {
      if (s.x1.height() != H || s.x1.width() != W || s.x2.height() != H || s.x2.width() != W) {
        throw DimensionError("all dataset images must share one shape");
      }
      if (s.param.size() != arity) throw ValidationError("pair parameter arity does not match the transform spec");
      out.u32(s.base_id);
      for (int p : s.param.indices) out.u16(static_cast<std::uint16_t>(p));
      for (double v : s.x1.pixels()) out.f32(static_cast<float>(v));
      for (double v : s.x2.pixels()) out.f32(static_cast<float>(v));
    }
  }
  return out.data();
}

DatasetBundle decode_dataset(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader in(bytes);
  in.expect_tag("EQDS", "dataset");
  const std::size_t version_at = in.offset();
  if (in.u16() != kDatasetVersion) throw ParseError("unsupported EQDS version", version_at);
  const std::uint32_t counts[3] = {in.u32(), in.u32(), in.u32()};
  const auto H = static_cast<int>(in.u32());
  const auto W = static_cast<int>(in.u32());
  DatasetBundle data;
  data.transforms.rotations = in.u16();
  data.transforms.tx = in.u16();
  data.transforms.ty = in.u16();
  const std::size_t method_at = in.offset();
  const auto method = in.u8();
  if (method > 1) throw ParseError("unknown rotation method", method_at);
  data.transforms.method = static_cast<RotationMethod>(method);
  const std::size_t arity_at = in.offset();
  const auto arity = in.u8();
  if (data.transforms.rotations < 1 || data.transforms.tx < 1 || data.transforms.ty < 1 ||
      arity != data.transforms.orders().size()) {
    throw ParseError("inconsistent transform spec", arity_at);
  }
  const std::size_t npx = static_cast<std::size_t>(H) * W;
  auto read_image = [&]() {
    const std::size_t at = in.offset();
    std::vector<double> px(npx);
    for (auto& v : px) v = in.f32();
    try {
      return ImageGrid(H, W, std::move(px));
    } catch (const Error& e) {
      throw ParseError(e.what(), at);
    }
  };
  std::vector<PairSample>* splits[3] = {&data.train, &data.val, &data.test};
  for (int s = 0; s < 3; ++s) {
    splits[s]->reserve(counts[s]);
    for (std::uint32_t n = 0; n < counts[s]; ++n) {
      PairSample p;
      p.base_id = in.u32();
      std::vector<int> idx(arity);
      for (auto& v : idx) v = in.u16();
      p.param = GroupElement(std::move(idx));
      p.x1 = read_image();
      p.x2 = read_image();
      splits[s]->push_back(std::move(p));
    }
  }
  if (in.remaining() != 0) throw ParseError("trailing bytes after dataset payload", in.offset());
  return data;
}

void write_dataset(const DatasetBundle& data, const std::filesystem::path& path) {
  io::write_atomic(path, encode_dataset(data));
}

DatasetBundle read_dataset(const std::filesystem::path& path) { return decode_dataset(io::read_file(path)); }

}  // namespace eqop
