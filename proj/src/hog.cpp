#include <algorithm>
#include <cmath>
#include <numbers>

#include "fontsynth/glyph_metrics.hpp"

namespace fontsynth {

std::size_t HogConfig::descriptor_length() const {
  const int cells = image_size / cell_size;
  const int blocks = cells - block_cells + 1;
  return static_cast<std::size_t>(blocks) * blocks * block_cells * block_cells * bins;
}

std::vector<double> hog_descriptor(const FloatImage& image, const HogConfig& cfg) {
  if (cfg.cell_size <= 0 || cfg.bins <= 0 || cfg.block_cells <= 0 ||
      cfg.image_size < cfg.cell_size * cfg.block_cells) {
    throw Error(ErrorCode::InvalidArgument, "invalid HOG configuration");
  }
  const int n = cfg.image_size;
  const FloatImage img = (image.width() == n && image.height() == n)
                             ? image
                             : resize_area(image, n, n);

  // Central differences; the outermost rows/columns carry no gradient.
  const int cells = n / cfg.cell_size;
  FloatImage hist(cells * cfg.bins, cells, 0.0);
  const double bin_width = 180.0 / cfg.bins;
  for (int y = 0; y < cells * cfg.cell_size; ++y) {
    for (int x = 0; x < cells * cfg.cell_size; ++x) {
      const double gx = (x > 0 && x < n - 1) ? img(x + 1, y) - img(x - 1, y) : 0.0;
      const double gy = (y > 0 && y < n - 1) ? img(x, y + 1) - img(x, y - 1) : 0.0;
      const double magnitude = std::hypot(gx, gy);
      if (magnitude == 0.0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const int bin = std::min(cfg.bins - 1, static_cast<int>(angle / bin_width));
      hist((x / cfg.cell_size) * cfg.bins + bin, y / cfg.cell_size) += magnitude;
    }
  }
  const double cell_area = static_cast<double>(cfg.cell_size) * cfg.cell_size;
  for (double& v : hist.pixels()) v /= cell_area;

  const int blocks = cells - cfg.block_cells + 1;
  std::vector<double> out;
  out.reserve(cfg.descriptor_length());
  std::vector<double> block;
  for (int by = 0; by < blocks; ++by) {
    for (int bx = 0; bx < blocks; ++bx) {
      block.clear();
      for (int cy = 0; cy < cfg.block_cells; ++cy) {
        for (int cx = 0; cx < cfg.block_cells; ++cx) {
          for (int b = 0; b < cfg.bins; ++b) {
            block.push_back(hist((bx + cx) * cfg.bins + b, by + cy));
          }
        }
      }
      double sq = 0;
      for (double v : block) sq += v * v;
      const double norm = std::sqrt(sq + cfg.epsilon * cfg.epsilon);
      for (double v : block) out.push_back(v / norm);
    }
  }
  return out;
}

std::vector<double> hog_descriptor(const Mask& mask, const HogConfig& cfg) {
  FloatImage image(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) image(x, y) = mask(x, y) ? 1.0 : 0.0;
  }
  return hog_descriptor(image, cfg);
}

double hog_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor lengths differ");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(x * x) == x in IEEE arithmetic, so identical inputs give exactly 1.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace fontsynth
