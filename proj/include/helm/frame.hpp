#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace helm {

/// Row-major grayscale image with intensities in [0, 1].
class Frame {
public:
  Frame() = default;
  Frame(int width, int height, float fill = 0.0f)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  float at(int x, int y) const { return data_[index(x, y)]; }
  float& at(int x, int y) { return data_[index(x, y)]; }

  const float* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
  float* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

  std::span<const float> pixels() const { return data_; }
  std::span<float> pixels() { return data_; }

  /// Copy of the rectangle [x, x+w) x [y, y+h); must lie inside the frame.
  Frame crop(int x, int y, int w, int h) const;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

} // namespace helm
