#pragma once

#include <vector>

#include <Eigen/Dense>

namespace eqop {

/// Row-major H x W image with pixels in [0, 1].
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int height, int width);  // all zeros
  ImageGrid(int height, int width, std::vector<double> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  int size() const { return height_ * width_; }
  bool empty() const { return pixels_.empty(); }

  double operator()(int r, int c) const { return pixels_[static_cast<std::size_t>(r) * width_ + c]; }
  double& operator()(int r, int c) { return pixels_[static_cast<std::size_t>(r) * width_ + c]; }

  const std::vector<double>& pixels() const { return pixels_; }
  Eigen::Map<const Eigen::VectorXd> vector() const { return {pixels_.data(), static_cast<Eigen::Index>(pixels_.size())}; }

  static ImageGrid from_vector(int height, int width, const Eigen::VectorXd& v);

  bool operator==(const ImageGrid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// max |a - b| over pixels; images must have equal shape.
double linf_distance(const ImageGrid& a, const ImageGrid& b);
double mean_abs_difference(const ImageGrid& a, const ImageGrid& b);

}  // namespace eqop
