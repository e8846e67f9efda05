#include <algorithm>
#include <cmath>

#include "fontsynth/glyph_metrics.hpp"

namespace fontsynth {

namespace {

// Lattice bbox of the transformed generated mask.
Box transformed_bbox(const Mask& gen, const AlignmentResult& a) {
  const Box b = tight_bbox(gen);
  const int x0 = static_cast<int>(std::floor(b.x * a.scale)) + a.tx - 2;
  const int y0 = static_cast<int>(std::floor(b.y * a.scale)) + a.ty - 2;
  const int x1 = static_cast<int>(std::ceil(b.right() * a.scale)) + a.tx + 2;
  const int y1 = static_cast<int>(std::ceil(b.bottom() * a.scale)) + a.ty + 2;
  const Box probe{x0, y0, x1 - x0, y1 - y0};
  const Box local = tight_bbox(transform_mask(gen, a.scale, a.tx, a.ty, probe));
  return {local.x + x0, local.y + y0, local.w, local.h};
}

Box square_frame(const Box& a, const Box& b) {
  const int left = std::min(a.x, b.x), top = std::min(a.y, b.y);
  const int right = std::max(a.right(), b.right());
  const int bottom = std::max(a.bottom(), b.bottom());
  const int span = std::max(right - left, bottom - top);
  const int pad = std::max(4, static_cast<int>(std::lround(0.1 * span)));
  const int side = span + 2 * pad;
  const int x = (left + right - side) / 2;
  const int y = (top + bottom - side) / 2;
  return {x, y, side, side};
}

FloatImage coverage(const Mask& mask, int size) {
  FloatImage full(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) full(x, y) = mask(x, y) ? 1.0 : 0.0;
  }
  return resize_area(full, size, size);
}

GrayImage to_canvas(const FloatImage& cov) {
  GrayImage out(cov.width(), cov.height());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    out.pixels()[i] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - cov.pixels()[i])));
  }
  return out;
}

}  // namespace

AlignedPair render_aligned_pair(const Mask& gen, const Mask& gt,
                                const AlignmentResult& alignment, int size) {
  if (size <= 0) throw Error(ErrorCode::InvalidArgument, "compare size must be positive");
  const Box frame = square_frame(transformed_bbox(gen, alignment), tight_bbox(gt));
  const Mask gen_frame = transform_mask(gen, alignment.scale, alignment.tx, alignment.ty, frame);
  Mask gt_frame(frame.w, frame.h);
  for (int y = 0; y < frame.h; ++y) {
    for (int x = 0; x < frame.w; ++x) {
      if (gt.at(frame.x + x, frame.y + y)) gt_frame.set(x, y);
    }
  }
  AlignedPair pair;
  pair.gen_coverage = coverage(gen_frame, size);
  pair.gt_coverage = coverage(gt_frame, size);
  pair.gen = to_canvas(pair.gen_coverage);
  pair.gt = to_canvas(pair.gt_coverage);
  return pair;
}

FontSimilarityReport font_similarity(const SegmentedGlyph& gen, const SegmentedGlyph& gt,
                                     const FontSimilarityOptions& options) {
  FontSimilarityReport report;
  report.alignment = align_max_iou(gen.mask, gt.mask, options.search);
  report.max_iou = report.alignment.iou;
  const AlignedPair pair =
      render_aligned_pair(gen.mask, gt.mask, report.alignment, options.compare_size);
  const auto hog_gen = hog_descriptor(pair.gen_coverage, options.hog);
  const auto hog_gt = hog_descriptor(pair.gt_coverage, options.hog);
  report.hog_sim = hog_similarity(hog_gen, hog_gt);
  report.ms_ssim = ms_ssim(pair.gen, pair.gt, options.ms_ssim);
  return report;
}

bool quality_filter(double max_iou, double hog_sim, const FilterThresholds& t) {
  return max_iou > t.max_iou && hog_sim > t.hog_sim;
}

}  // namespace fontsynth
