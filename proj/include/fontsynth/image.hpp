#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fontsynth/error.hpp"

namespace fontsynth {

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  bool empty() const { return w <= 0 || h <= 0; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Dense row-major single-plane image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(checked_area(width, height)), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
  const T* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_;
  }

  std::vector<T>& pixels() { return data_; }
  const std::vector<T>& pixels() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static long long checked_area(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::InvalidArgument, "negative image dimensions");
    }
    return static_cast<long long>(width) * height;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Image<std::uint8_t>;
using FloatImage = Image<double>;
using RgbImage = Image<Rgb>;

/// Binary image; stored one byte per pixel holding 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false)
      : bits_(width, height, fill ? 1 : 0) {}

  int width() const { return bits_.width(); }
  int height() const { return bits_.height(); }
  bool contains(int x, int y) const { return bits_.contains(x, y); }

  bool operator()(int x, int y) const { return bits_(x, y) != 0; }
  void set(int x, int y, bool value = true) { bits_(x, y) = value ? 1 : 0; }

  /// Out-of-range reads are background.
  bool at(int x, int y) const { return contains(x, y) && bits_(x, y) != 0; }

  const std::uint8_t* row(int y) const { return bits_.row(y); }

  std::size_t count() const;
  bool any() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  Image<std::uint8_t> bits_;
};

/// Minimal axis-aligned box enclosing every true pixel.
/// Throws EmptyMask when the mask has no true pixel.
Box tight_bbox(const Mask& mask);

/// Glyph pixels are those at or below 127 (coverage >= 0.5 of full ink on a
/// 0 = ink, 255 = paper canvas).
Mask mask_from_canvas(const GrayImage& canvas);

/// Binarize an 8-bit mask image where 255 is glyph; soft values threshold at
/// 0.5 of full scale.
Mask mask_from_gray(const GrayImage& image);

/// 255 where the mask is set, 0 elsewhere.
GrayImage mask_to_gray(const Mask& mask);

/// Glyph = 0 on a 255 background.
GrayImage mask_to_canvas(const Mask& mask);

/// Area-averaging (box filter) resample to the requested size. Exact for
/// integer downscale factors; falls back to pixel replication upwards.
FloatImage resize_area(const FloatImage& src, int width, int height);

}  // namespace fontsynth
