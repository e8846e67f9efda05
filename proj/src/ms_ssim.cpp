#include <algorithm>
#include <cmath>
#include <vector>

#include "fontsynth/glyph_metrics.hpp"

namespace fontsynth {

int MsSsimConfig::min_size() const {
  return window << (static_cast<int>(weights.size()) - 1);
}

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    const double d = i - size / 2;
    k[i] = std::exp(-(d * d) / (2 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable 'valid' correlation: output shrinks by size - 1 on each axis.
FloatImage filter_valid(const FloatImage& in, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int w = in.width() - n + 1;
  const int h = in.height() - n + 1;
  FloatImage horizontal(w, in.height());
  for (int y = 0; y < in.height(); ++y) {
    const double* src = in.row(y);
    double* dst = horizontal.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[i] * src[x + i];
      dst[x] = acc;
    }
  }
  FloatImage out(w, h);
  for (int y = 0; y < h; ++y) {
    double* dst = out.row(y);
    for (int i = 0; i < n; ++i) {
      const double* src = horizontal.row(y + i);
      for (int x = 0; x < w; ++x) dst[x] += k[i] * src[x];
    }
  }
  return out;
}

// 2x2 average pooling; odd sides get one zero-padded row/column on each
// border, counted in the average.
FloatImage downsample(const FloatImage& in) {
  const int pw = in.width() % 2, ph = in.height() % 2;
  const int w = (in.width() + 2 * pw - 2) / 2 + 1;
  const int h = (in.height() + 2 * ph - 2) / 2 + 1;
  FloatImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx - pw, sy = 2 * y + dy - ph;
          if (in.contains(sx, sy)) acc += in(sx, sy);
        }
      }
      out(x, y) = acc / 4.0;
    }
  }
  return out;
}

struct ScaleStats {
  double ssim;
  double cs;
};

ScaleStats ssim_at_scale(const FloatImage& a, const FloatImage& b,
                         const std::vector<double>& kernel, double c1, double c2) {
  FloatImage aa(a.width(), a.height()), bb(a.width(), a.height()), ab(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa.pixels()[i] = a.pixels()[i] * a.pixels()[i];
    bb.pixels()[i] = b.pixels()[i] * b.pixels()[i];
    ab.pixels()[i] = a.pixels()[i] * b.pixels()[i];
  }
  const FloatImage mu1 = filter_valid(a, kernel);
  const FloatImage mu2 = filter_valid(b, kernel);
  const FloatImage e11 = filter_valid(aa, kernel);
  const FloatImage e22 = filter_valid(bb, kernel);
  const FloatImage e12 = filter_valid(ab, kernel);

  double ssim_sum = 0, cs_sum = 0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = mu1.pixels()[i], m2 = mu2.pixels()[i];
    const double m1m2 = m1 * m2;
    const double s11 = e11.pixels()[i] - m1 * m1;
    const double s22 = e22.pixels()[i] - m2 * m2;
    const double s12 = e12.pixels()[i] - m1m2;
    const double cs = (2.0 * s12 + c2) / (s11 + s22 + c2);
    const double luminance = (2.0 * m1m2 + c1) / (m1 * m1 + m2 * m2 + c1);
    cs_sum += cs;
    ssim_sum += luminance * cs;
  }
  const double n = static_cast<double>(mu1.size());
  return {ssim_sum / n, cs_sum / n};
}

FloatImage to_float(const GrayImage& image) {
  FloatImage out(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) out.pixels()[i] = image.pixels()[i];
  return out;
}

}  // namespace

double ms_ssim(const GrayImage& a, const GrayImage& b, const MsSsimConfig& config) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "MS-SSIM inputs differ in size");
  }
  if (std::min(a.width(), a.height()) < config.min_size()) {
    throw Error(ErrorCode::TooSmall,
                "MS-SSIM needs at least " + std::to_string(config.min_size()) +
                    " px per side for " + std::to_string(config.weights.size()) +
                    " scales");
  }
  const auto kernel = gaussian_kernel(config.window, config.sigma);
  const double c1 = std::pow(config.k1 * config.data_range, 2);
  const double c2 = std::pow(config.k2 * config.data_range, 2);

  FloatImage x = to_float(a), y = to_float(b);
  const std::size_t levels = config.weights.size();
  double result = 1.0;
  for (std::size_t level = 0; level < levels; ++level) {
    const ScaleStats stats = ssim_at_scale(x, y, kernel, c1, c2);
    if (level + 1 < levels) {
      result *= std::pow(std::max(stats.cs, 0.0), config.weights[level]);
      x = downsample(x);
      y = downsample(y);
    } else {
      result *= std::pow(std::max(stats.ssim, 0.0), config.weights[level]);
    }
  }
  return result;
}

}  // namespace fontsynth
