#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fontsynth/image.hpp"

namespace fontsynth {

struct SegmentedGlyph {
  enum class Origin { synthetic_gt, external_soft_mask };

  Mask mask;
  Origin origin = Origin::synthetic_gt;

  /// Soft masks (255 = glyph) binarize at 0.5 of full scale.
  static SegmentedGlyph from_soft_mask(const GrayImage& soft);
};

/// |a & b| / |a | b|; 0 when both are empty. Throws DimensionMismatch.
double iou(const Mask& a, const Mask& b);

/// Uniform-scale + integer-translation sweep.
struct SearchConfig {
  double scale_min = 0.5;
  double scale_max = 2.0;
  int scale_steps = 21;
  int coarse_stride = 4;
  int refine_radius = 4;
};

/// Geometric grid scale_min * (scale_max / scale_min)^(i / (steps - 1)).
std::vector<double> scale_grid(const SearchConfig& config);

/// The generated mask placed in the ground-truth frame:
///   T(x, y) = gen(floor((x - tx + 0.5) / scale), floor((y - ty + 0.5) / scale))
/// on the unbounded pixel lattice (nearest-neighbour about the origin).
struct AlignmentResult {
  double scale = 1.0;
  int tx = 0;
  int ty = 0;
  double iou = 0.0;
  std::int64_t intersection = 0;
  std::int64_t union_area = 0;
};

/// IoU of gt against gen transformed by (scale, tx, ty). Pixels of the
/// transformed mask falling outside the gt frame still count in the union.
double aligned_iou(const Mask& gen, const Mask& gt, double scale, int tx, int ty);

/// Rasterize the transformed generated mask into `frame` (lattice
/// coordinates of the gt frame; may extend past it).
Mask transform_mask(const Mask& gen, double scale, int tx, int ty, const Box& frame);

/// Coarse-to-fine maximum-IoU alignment. Ties prefer the smallest |log scale|,
/// then the smallest |tx| + |ty|. Throws EmptyMask.
AlignmentResult align_max_iou(const Mask& gen, const Mask& gt,
                              const SearchConfig& config = {});

struct HogConfig {
  int image_size = 128;
  int cell_size = 8;
  int block_cells = 2;
  int bins = 9;
  double epsilon = 1e-6;

  std::size_t descriptor_length() const;
};

/// Unsigned-gradient HOG over an intensity image resized to
/// image_size^2; L2-normalised overlapping blocks, row-major block order
/// (block row, block col, cell row, cell col, bin).
std::vector<double> hog_descriptor(const FloatImage& image, const HogConfig& config = {});
std::vector<double> hog_descriptor(const Mask& mask, const HogConfig& config = {});

/// Cosine similarity; 0 when either vector has zero norm.
double hog_similarity(std::span<const double> a, std::span<const double> b);

struct MsSsimConfig {
  int window = 11;
  double sigma = 1.5;
  std::array<double, 5> weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  double data_range = 255.0;
  double k1 = 0.01;
  double k2 = 0.03;

  /// Smallest side that still leaves a full window at the coarsest scale.
  int min_size() const;
};

/// Five-scale MS-SSIM with a valid-region Gaussian window and 2x2 average
/// pooling between scales. Throws DimensionMismatch or TooSmall.
double ms_ssim(const GrayImage& a, const GrayImage& b, const MsSsimConfig& config = {});

struct FontSimilarityOptions {
  SearchConfig search;
  int compare_size = 256;
  HogConfig hog;
  MsSsimConfig ms_ssim;
};

struct FontSimilarityReport {
  double max_iou = 0;
  double hog_sim = 0;
  double ms_ssim = 0;
  std::optional<double> lpips;
  AlignmentResult alignment;
};

/// Both glyphs rendered in the aligned common frame, glyph = 0 on 255.
struct AlignedPair {
  GrayImage gen;
  GrayImage gt;
  FloatImage gen_coverage;
  FloatImage gt_coverage;
};

AlignedPair render_aligned_pair(const Mask& gen, const Mask& gt,
                                const AlignmentResult& alignment, int size);

FontSimilarityReport font_similarity(const SegmentedGlyph& gen, const SegmentedGlyph& gt,
                                     const FontSimilarityOptions& options = {});

struct FilterThresholds {
  double max_iou = 0.59;
  double hog_sim = 0.80;
};

/// Keep iff max_iou > threshold and hog_sim > threshold (both strict).
bool quality_filter(double max_iou, double hog_sim, const FilterThresholds& t = {});
inline bool quality_filter(const FontSimilarityReport& r, const FilterThresholds& t = {}) {
  return quality_filter(r.max_iou, r.hog_sim, t);
}

}  // namespace fontsynth
