#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "eqop/binary_io.hpp"
#include "eqop/dataset.hpp"
#include "eqop/errors.hpp"
#include "eqop/idx.hpp"
#include "eqop/imaging.hpp"

using namespace eqop;

namespace {

ImageGrid ramp(int h, int w) {
  std::vector<double> px(static_cast<std::size_t>(h * w));
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<double>(i) / static_cast<double>(px.size());
  return ImageGrid(h, w, px);
}

std::vector<std::uint8_t> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

std::vector<std::uint8_t> idx_images(int n, int h, int w) {
  std::vector<std::uint8_t> out = be32(0x00000803);
  for (int v : {n, h, w}) {
    const auto b = be32(static_cast<std::uint32_t>(v));
    out.insert(out.end(), b.begin(), b.end());
  }
  for (int i = 0; i < n * h * w; ++i) out.push_back(static_cast<std::uint8_t>((i * 37) % 256));
  return out;
}

}  // namespace

TEST_CASE("translate_periodic") {
  const ImageGrid abc(1, 3, {0.1, 0.2, 0.3});
  CHECK(translate_periodic(abc, 1, 0) == ImageGrid(1, 3, {0.3, 0.1, 0.2}));
  CHECK(translate_periodic(abc, 0, 0) == abc);
  CHECK(translate_periodic(abc, 3, 0) == abc);
  CHECK(translate_periodic(abc, -1, 0) == ImageGrid(1, 3, {0.2, 0.3, 0.1}));

  const ImageGrid x = ramp(5, 7);
  // Index oracle.
  const ImageGrid t = translate_periodic(x, 3, -2);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 7; ++c) CHECK(t(r, c) == x(((r + 2) % 5 + 5) % 5, ((c - 3) % 7 + 7) % 7));
  }
  // Composition adds offsets; inverse undoes.
  CHECK(translate_periodic(translate_periodic(x, 2, 1), 4, 3) == translate_periodic(x, 6, 4));
  CHECK(translate_periodic(translate_periodic(x, 2, 1), -2, -1) == x);
  CHECK(translate_periodic(x, 7, 5) == x);
}

TEST_CASE("rotate exact90") {
  const ImageGrid x = ramp(4, 4);
  CHECK(rotate(x, 0, 4, RotationMethod::Exact90) == x);
  CHECK(rotate(rotate(x, 2, 4, RotationMethod::Exact90), 2, 4, RotationMethod::Exact90) == x);
  ImageGrid y = x;
  for (int i = 0; i < 4; ++i) y = rotate(y, 1, 4, RotationMethod::Exact90);
  CHECK(y == x);
  // Counter-clockwise: the top-right corner moves to the top-left.
  ImageGrid dot(3, 3);
  dot(0, 2) = 1.0;
  const ImageGrid r = rotate(dot, 1, 4, RotationMethod::Exact90);
  CHECK(r(0, 0) == 1.0);
  CHECK(std::accumulate(r.pixels().begin(), r.pixels().end(), 0.0) == 1.0);
  // Pixel permutation: multiset of values preserved.
  auto a = x.pixels(), b = rotate(x, 1, 4, RotationMethod::Exact90).pixels();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK_THROWS_AS(rotate(x, 1, 10, RotationMethod::Exact90), UnsupportedError);
}

TEST_CASE("rotate bilinear") {
  const ImageGrid x = ramp(6, 6);
  CHECK(rotate(x, 0, 10, RotationMethod::Bilinear) == x);
  // Centered symmetric cross is invariant under 180 degrees.
  ImageGrid cross(7, 7);
  for (int i = 1; i < 6; ++i) {
    cross(3, i) = 1.0;
    cross(i, 3) = 1.0;
  }
  CHECK(linf_distance(rotate(cross, 5, 10, RotationMethod::Bilinear), cross) < 1e-6);
  // Bilinear quarter turn agrees with the exact one on odd-size images.
  const ImageGrid odd = ramp(5, 5);
  CHECK(linf_distance(rotate(odd, 1, 4, RotationMethod::Bilinear), rotate(odd, 1, 4, RotationMethod::Exact90)) < 1e-9);
  const ImageGrid turned = rotate(ramp(9, 9), 3, 10, RotationMethod::Bilinear);
  for (double v : turned.pixels()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(rotate(x, 10, 10, RotationMethod::Bilinear), ValidationError);
}

TEST_CASE("gen_shapes") {
  const auto a = gen_shapes(20, 5);
  const auto b = gen_shapes(20, 5);
  CHECK(a == b);
  CHECK(a.size() == 20);
  CHECK(gen_shapes(3, 6) != gen_shapes(3, 5));
  // Prefix stability: image i depends only on (seed, i).
  const auto c = gen_shapes(5, 5);
  CHECK(std::equal(c.begin(), c.end(), a.begin()));
  for (const auto& img : a) {
    CHECK(img.height() == 28);
    CHECK(img.width() == 28);
    const auto [mn, mx] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    CHECK(*mn == 0.0);
    CHECK(*mx == 1.0);
    const auto on = std::count(img.pixels().begin(), img.pixels().end(), 1.0);
    CHECK(on >= 5);
    CHECK(on + std::count(img.pixels().begin(), img.pixels().end(), 0.0) == img.size());
    // Inside the central 22 x 22 region.
    for (int r = 0; r < 28; ++r) {
      for (int c2 = 0; c2 < 28; ++c2) {
        if (img(r, c2) > 0) {
          CHECK(r >= 3);
          CHECK(r < 25);
          CHECK(c2 >= 3);
          CHECK(c2 < 25);
        }
      }
    }
  }
  CHECK(gen_shapes(2000, 0).size() == 2000);
  CHECK_THROWS_AS(gen_shapes(0, 0), ValidationError);
}

TEST_CASE("draw_line") {
  ImageGrid img(5, 5);
  draw_line(img, 0, 0, 4, 4);
  for (int i = 0; i < 5; ++i) CHECK(img(i, i) == 1.0);
  CHECK(std::accumulate(img.pixels().begin(), img.pixels().end(), 0.0) == 5.0);
  ImageGrid h(3, 6);
  draw_line(h, 1, 5, 1, 0);
  for (int c = 0; c < 6; ++c) CHECK(h(1, c) == 1.0);
}

TEST_CASE("TransformSpec") {
  const auto t = TransformSpec::make(4, 5, 1);
  CHECK(t.method == RotationMethod::Exact90);
  CHECK(TransformSpec::make(10, 1, 1).method == RotationMethod::Bilinear);
  CHECK(t.orders() == std::vector<int>{4, 5});
  CHECK(t.roles() == "rx");
  CHECK(t.group().kind() == GroupKind::DirectProduct);
  CHECK(TransformSpec::make(10, 1, 1).group() == GroupSpec::cyclic(10));
  // Rotate first, then translate in x, then in y.
  const auto full = TransformSpec::make(4, 3, 2);
  const ImageGrid x = ramp(6, 6);
  const ImageGrid expected =
      translate_periodic(translate_periodic(rotate(x, 1, 4, RotationMethod::Exact90), 2, 0), 0, 1);
  CHECK(full.apply(x, {1, 2, 1}) == expected);
  CHECK(full.apply(x, {0, 0, 0}) == x);
  CHECK_THROWS_AS(full.apply(x, {4, 0, 0}), ValidationError);
  CHECK_THROWS_AS(TransformSpec::make(0, 1, 1), ValidationError);
}

TEST_CASE("build_pairs") {
  const auto shapes = gen_shapes(3, 1);
  const auto t = TransformSpec::make(1, 4, 1);
  const auto base = build_pairs(shapes, t, {PairAnchors::Base, std::nullopt, 0});
  CHECK(base.size() == 12);
  const auto orbit = build_pairs(shapes, t, {PairAnchors::Orbit, std::nullopt, 0});
  CHECK(orbit.size() == 48);
  for (const auto& p : orbit) CHECK(t.apply(p.x1, p.param) == p.x2);
  for (const auto& p : base) CHECK(p.x1 == shapes[p.base_id]);
  const auto capped = build_pairs(shapes, t, {PairAnchors::Orbit, 10, 3});
  CHECK(capped.size() == 10);
  CHECK(capped.size() == build_pairs(shapes, t, {PairAnchors::Orbit, 10, 3}).size());
  for (std::size_t i = 1; i < capped.size(); ++i) CHECK(capped[i - 1].base_id <= capped[i].base_id);
  // Rotated pairs satisfy the declared transform within rasterization tolerance.
  const auto rot = TransformSpec::make(10, 1, 1);
  for (const auto& p : build_pairs({shapes[0]}, rot, {PairAnchors::Orbit, std::nullopt, 0})) {
    CHECK(linf_distance(rot.apply(p.x1, p.param), p.x2) < 1e-12);
  }
}

TEST_CASE("split_bases") {
  std::vector<std::uint32_t> ids(200);
  std::iota(ids.begin(), ids.end(), 0u);
  const auto s = split_bases(ids, {}, 9);
  CHECK(s.test.size() == 100);
  CHECK(s.val.size() == 20);
  CHECK(s.train.size() == 80);
  std::set<std::uint32_t> all;
  for (const auto* v : {&s.train, &s.val, &s.test}) all.insert(v->begin(), v->end());
  CHECK(all.size() == 200);
  const auto again = split_bases(ids, {}, 9);
  CHECK(again.train == s.train);
  CHECK(split_bases(ids, {}, 10).train != s.train);
  const auto odd = split_bases({0, 1, 2, 3, 4, 5, 6}, {}, 0);
  CHECK(odd.test.size() == 3);
  CHECK(odd.val.size() == 1);
  CHECK(odd.train.size() == 3);
  CHECK_THROWS_AS(split_bases({0, 1, 2}, {}, 0), ValidationError);
  CHECK_THROWS_AS(split_bases(ids, {1.5, 0.2}, 0), ValidationError);
}

TEST_CASE("build_dataset and EQDS round trip") {
  const auto shapes = gen_shapes(12, 2);
  const auto t = TransformSpec::make(10, 1, 1);
  const auto data = build_dataset(shapes, t, {}, PairAnchors::Orbit, {50, 20, std::nullopt}, 4);
  CHECK(data.train.size() == 50);
  CHECK(data.val.size() == 20);
  CHECK(data.test.size() == 600);
  std::set<std::uint32_t> tr, va, te;
  for (const auto& p : data.train) tr.insert(p.base_id);
  for (const auto& p : data.val) va.insert(p.base_id);
  for (const auto& p : data.test) te.insert(p.base_id);
  for (auto id : te) {
    CHECK(!tr.count(id));
    CHECK(!va.count(id));
  }
  for (auto id : va) CHECK(!tr.count(id));

  const auto bytes = encode_dataset(data);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EQDS");
  const auto back = decode_dataset(bytes);
  CHECK(back.transforms == data.transforms);
  REQUIRE(back.test.size() == data.test.size());
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    CHECK(back.test[i].param == data.test[i].param);
    CHECK(back.test[i].base_id == data.test[i].base_id);
    CHECK(linf_distance(back.test[i].x2, data.test[i].x2) < 1e-7);
  }
  CHECK(encode_dataset(back) == bytes);

  auto bad = bytes;
  bad[1] = 'X';
  CHECK_THROWS_AS(decode_dataset(bad), ParseError);
  bad = bytes;
  bad.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_dataset(bad), ParseError);

  const auto dir = std::filesystem::temp_directory_path() / "eqop_test_imaging";
  std::filesystem::create_directories(dir);
  write_dataset(data, dir / "d.eqds");
  CHECK(encode_dataset(read_dataset(dir / "d.eqds")) == bytes);
  CHECK_THROWS_AS(read_dataset(dir / "missing.eqds"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("IDX parsing") {
  const auto bytes = idx_images(2, 3, 4);
  const auto imgs = parse_idx_images(bytes);
  REQUIRE(imgs.size() == 2);
  CHECK(imgs[0].height() == 3);
  CHECK(imgs[0].width() == 4);
  CHECK(imgs[0](0, 1) == doctest::Approx(37.0 / 255.0));
  CHECK(imgs[1](0, 0) == doctest::Approx(((12 * 37) % 256) / 255.0));

  auto bad = bytes;
  bad[3] = 0x01;
  CHECK_THROWS_AS(parse_idx_images(bad), ParseError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(parse_idx_images(bad), ParseError);

  std::vector<std::uint8_t> labels = be32(0x00000801);
  const auto n = be32(3);
  labels.insert(labels.end(), n.begin(), n.end());
  labels.insert(labels.end(), {7, 1, 9});
  CHECK(parse_idx_labels(labels) == std::vector<std::uint8_t>{7, 1, 9});
  labels.pop_back();
  CHECK_THROWS_AS(parse_idx_labels(labels), ParseError);
}
