#include "fontsynth/image.hpp"

#include <algorithm>
#include <cmath>

namespace fontsynth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnreadableFont: return "UnreadableFont";
    case ErrorCode::EmptyFont: return "EmptyFont";
    case ErrorCode::MissingGlyph: return "MissingGlyph";
    case ErrorCode::WordTooLong: return "WordTooLong";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::TransformOutOfBounds: return "TransformOutOfBounds";
    case ErrorCode::DictionaryTooSmall: return "DictionaryTooSmall";
    case ErrorCode::InsufficientWordsForFont: return "InsufficientWordsForFont";
    case ErrorCode::MalformedTemplate: return "MalformedTemplate";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::MissingMask: return "MissingMask";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::SplitOverlap: return "SplitOverlap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count(bits_.pixels().begin(), bits_.pixels().end(), 1));
}

bool Mask::any() const {
  return std::find(bits_.pixels().begin(), bits_.pixels().end(), 1) !=
         bits_.pixels().end();
}

Box tight_bbox(const Mask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    const std::uint8_t* row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (row[x]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = y;
      }
    }
  }
  if (x1 < 0) throw Error(ErrorCode::EmptyMask, "mask has no true pixel");
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Mask mask_from_canvas(const GrayImage& canvas) {
  Mask mask(canvas.width(), canvas.height());
  for (int y = 0; y < canvas.height(); ++y) {
    for (int x = 0; x < canvas.width(); ++x) {
      if (canvas(x, y) <= 127) mask.set(x, y);
    }
  }
  return mask;
}

Mask mask_from_gray(const GrayImage& image) {
  Mask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (image(x, y) >= 128) mask.set(x, y);
    }
  }
  return mask;
}

GrayImage mask_to_gray(const Mask& mask) {
  GrayImage out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out(x, y) = mask(x, y) ? 255 : 0;
  }
  return out;
}

GrayImage mask_to_canvas(const Mask& mask) {
  GrayImage out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out(x, y) = mask(x, y) ? 0 : 255;
  }
  return out;
}

namespace {

struct Tap {
  int src;
  double weight;
};

// For each destination index, the source cells overlapping its footprint and
// the fraction of the footprint each one covers.
std::vector<std::vector<Tap>> area_taps(int src_len, int dst_len) {
  std::vector<std::vector<Tap>> taps(dst_len);
  const double ratio = static_cast<double>(src_len) / dst_len;
  for (int i = 0; i < dst_len; ++i) {
    const double lo = i * ratio;
    const double hi = (i + 1) * ratio;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(src_len - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int s = first; s <= last; ++s) {
      const double overlap = std::min(hi, s + 1.0) - std::max(lo, double(s));
      if (overlap > 0) taps[i].push_back({s, overlap / ratio});
    }
  }
  return taps;
}

}  // namespace

FloatImage resize_area(const FloatImage& src, int width, int height) {
  if (width <= 0 || height <= 0 || src.empty()) {
    throw Error(ErrorCode::InvalidArgument, "resize to an empty image");
  }
  const auto xtaps = area_taps(src.width(), width);
  const auto ytaps = area_taps(src.height(), height);

  FloatImage horizontal(width, src.height());
  for (int y = 0; y < src.height(); ++y) {
    const double* in = src.row(y);
    double* out = horizontal.row(y);
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const Tap& t : xtaps[x]) acc += in[t.src] * t.weight;
      out[x] = acc;
    }
  }
  FloatImage out(width, height);
  for (int y = 0; y < height; ++y) {
    double* dst = out.row(y);
    for (const Tap& t : ytaps[y]) {
      const double* in = horizontal.row(t.src);
      for (int x = 0; x < width; ++x) dst[x] += in[x] * t.weight;
    }
  }
  return out;
}

}  // namespace fontsynth
