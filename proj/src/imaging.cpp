#include "eqop/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "eqop/errors.hpp"

namespace eqop {

namespace {

int mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

ImageGrid::ImageGrid(int height, int width)
    : height_(height), width_(width), pixels_(static_cast<std::size_t>(height) * width, 0.0) {
  if (height < 1 || width < 1) throw ValidationError("image dimensions must be positive");
}

ImageGrid::ImageGrid(int height, int width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height < 1 || width < 1) throw ValidationError("image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("pixel count does not match " + std::to_string(height) + "x" + std::to_string(width));
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("pixel values must lie in [0, 1]");
  }
}

ImageGrid ImageGrid::from_vector(int height, int width, const Eigen::VectorXd& v) {
  return ImageGrid(height, width, std::vector<double>(v.data(), v.data() + v.size()));
}

double linf_distance(const ImageGrid& a, const ImageGrid& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw DimensionError("image shapes differ");
  return (a.vector() - b.vector()).cwiseAbs().maxCoeff();
}

double mean_abs_difference(const ImageGrid& a, const ImageGrid& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw DimensionError("image shapes differ");
  return (a.vector() - b.vector()).cwiseAbs().mean();
}

ImageGrid translate_periodic(const ImageGrid& x, int dx, int dy) {
  const int H = x.height(), W = x.width();
  ImageGrid out(H, W);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) out(r, c) = x(mod(r - dy, H), mod(c - dx, W));
  }
  return out;
}

std::string to_string(RotationMethod m) { return m == RotationMethod::Exact90 ? "exact90" : "bilinear"; }

RotationMethod rotation_method_from_string(const std::string& name) {
  if (name == "exact90") return RotationMethod::Exact90;
  if (name == "bilinear") return RotationMethod::Bilinear;
  throw ValidationError("unknown rotation method '" + name + "'");
}

ImageGrid rotate(const ImageGrid& x, int j, int K, RotationMethod method) {
  if (K < 1 || j < 0 || j >= K) throw ValidationError("rotation index out of range");
  if (j == 0) return x;
  const int H = x.height(), W = x.width();

  if (method == RotationMethod::Exact90) {
    if (4 % K != 0) throw UnsupportedError("exact90 rotation needs K in {1, 2, 4}, got " + std::to_string(K));
    if (H != W) throw UnsupportedError("exact90 rotation needs a square image");
    const int quarter_turns = j * (4 / K);
    ImageGrid out = x;
    for (int q = 0; q < quarter_turns; ++q) {
      ImageGrid next(H, W);
      // One counter-clockwise quarter turn.
      for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) next(r, c) = out(c, W - 1 - r);
      }
      out = std::move(next);
    }
    return out;
  }

  const double theta = 2.0 * std::numbers::pi * j / K;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cx = (W - 1) / 2.0, cy = (H - 1) / 2.0;
  auto sample = [&](int r, int c) { return (r >= 0 && r < H && c >= 0 && c < W) ? x(r, c) : 0.0; };

  ImageGrid out(H, W);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      // Inverse map of a counter-clockwise turn with rows pointing down.
      const double px = c - cx, py = r - cy;
      const double sx = cs * px - sn * py + cx;
      const double sy = sn * px + cs * py + cy;
      const double fx = std::floor(sx), fy = std::floor(sy);
      const double ax = sx - fx, ay = sy - fy;
      const int c0 = static_cast<int>(fx), r0 = static_cast<int>(fy);
      const double v = (1 - ay) * ((1 - ax) * sample(r0, c0) + ax * sample(r0, c0 + 1)) +
                       ay * ((1 - ax) * sample(r0 + 1, c0) + ax * sample(r0 + 1, c0 + 1));
      out(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

void draw_line(ImageGrid& img, int r0, int c0, int r1, int c1) {
  const int dc = std::abs(c1 - c0), sc = c0 < c1 ? 1 : -1;
  const int dr = -std::abs(r1 - r0), sr = r0 < r1 ? 1 : -1;
  int err = dc + dr;
  while (true) {
    if (r0 >= 0 && r0 < img.height() && c0 >= 0 && c0 < img.width()) img(r0, c0) = 1.0;
    if (r0 == r1 && c0 == c1) break;
    const int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      c0 += sc;
    }
    if (e2 <= dc) {
      err += dc;
      r0 += sr;
    }
  }
}

std::vector<ImageGrid> gen_shapes(int count, std::uint64_t seed, int size) {
  if (count < 1) throw ValidationError("gen_shapes: count must be >= 1");
  if (size < 3) throw ValidationError("gen_shapes: size must be >= 3");
  const int region = std::min(22, size);
  const int margin = (size - region) / 2;
  constexpr int kPoints = 5;

  std::vector<ImageGrid> shapes;
  shapes.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> coord(margin, margin + region - 1);
    std::vector<std::pair<int, int>> pts;
    while (static_cast<int>(pts.size()) < kPoints) {
      const std::pair<int, int> p{coord(rng), coord(rng)};
      // Distinct points keep at least 5 lit pixels per shape.
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    ImageGrid img(size, size);
    for (int p = 0; p < kPoints; ++p) {
      const auto& a = pts[p];
      const auto& b = pts[(p + 1) % kPoints];
      draw_line(img, a.first, a.second, b.first, b.second);
    }
    shapes.push_back(std::move(img));
  }
  return shapes;
}

TransformSpec TransformSpec::make(int rotations, int tx, int ty) {
  if (rotations < 1 || tx < 1 || ty < 1) throw ValidationError("transformation counts must be >= 1");
  TransformSpec t;
  t.rotations = rotations;
  t.tx = tx;
  t.ty = ty;
  t.method = (4 % rotations == 0) ? RotationMethod::Exact90 : RotationMethod::Bilinear;
  return t;
}

std::vector<int> TransformSpec::orders() const {
  std::vector<int> out;
  if (rotations > 1) out.push_back(rotations);
  if (tx > 1) out.push_back(tx);
  if (ty > 1) out.push_back(ty);
  if (out.empty()) out.push_back(1);
  return out;
}

std::string TransformSpec::roles() const {
  std::string out;
  if (rotations > 1) out += 'r';
  if (tx > 1) out += 'x';
  if (ty > 1) out += 'y';
  if (out.empty()) out = "r";
  return out;
}

GroupSpec TransformSpec::group() const {
  const auto o = orders();
  return o.size() == 1 ? GroupSpec::cyclic(o[0]) : GroupSpec::direct_product(o);
}

ImageGrid TransformSpec::apply(const ImageGrid& x, const GroupElement& g) const {
  const auto r = roles();
  if (g.size() != r.size()) throw ValidationError("transform parameter " + to_string(g) + " has the wrong arity");
  int j = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 'r') j = g[i];
    if (r[i] == 'x') dx = g[i];
    if (r[i] == 'y') dy = g[i];
  }
  if (j < 0 || j >= rotations || dx < 0 || dx >= tx || dy < 0 || dy >= ty) {
    throw ValidationError("transform parameter " + to_string(g) + " out of range");
  }
  ImageGrid out = rotations > 1 ? rotate(x, j, rotations, method) : x;
  if (dx != 0 || dy != 0) out = translate_periodic(out, dx, dy);
  return out;
}

}  // namespace eqop
