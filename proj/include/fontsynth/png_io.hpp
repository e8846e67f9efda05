#pragma once

#include <filesystem>

#include "fontsynth/image.hpp"

namespace fontsynth {

/// Any PNG color type is accepted and converted (RGB -> luma for gray reads,
/// alpha dropped, 16-bit stripped). Throws IoError on unreadable files.
GrayImage read_png_gray(const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const GrayImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// 8-bit mask PNG with 255 = glyph.
inline Mask read_mask_png(const std::filesystem::path& path) {
  return mask_from_gray(read_png_gray(path));
}
inline void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  write_png(path, mask_to_gray(mask));
}

}  // namespace fontsynth
