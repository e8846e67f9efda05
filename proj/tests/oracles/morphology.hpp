#pragma once

// Square-structuring-element dilation and erosion, plus random blob masks.

#include <cstdint>
#include <random>

#include "fontsynth/image.hpp"

namespace oracle {

inline fontsynth::Mask dilate(const fontsynth::Mask& m, int r) {
  fontsynth::Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool hit = false;
      for (int dy = -r; dy <= r && !hit; ++dy) {
        for (int dx = -r; dx <= r && !hit; ++dx) hit = m.at(x + dx, y + dy);
      }
      if (hit) out.set(x, y);
    }
  }
  return out;
}

inline fontsynth::Mask erode(const fontsynth::Mask& m, int r) {
  fontsynth::Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy) {
        for (int dx = -r; dx <= r && all; ++dx) all = m.at(x + dx, y + dy);
      }
      if (all) out.set(x, y);
    }
  }
  return out;
}

/// Union of a few random filled ellipses; never empty.
inline fontsynth::Mask random_blobs(int w, int h, std::mt19937_64& rng, int blobs = 3) {
  fontsynth::Mask m(w, h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int b = 0; b < blobs; ++b) {
    const double cx = u(rng) * w, cy = u(rng) * h;
    const double rx = 1 + u(rng) * w / 3.0, ry = 1 + u(rng) * h / 3.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
        if (dx * dx + dy * dy <= 1) m.set(x, y);
      }
    }
  }
  if (!m.any()) m.set(w / 2, h / 2);
  return m;
}

}  // namespace oracle
