#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fontsynth/glyph_metrics.hpp"

namespace fontsynth {

SegmentedGlyph SegmentedGlyph::from_soft_mask(const GrayImage& soft) {
  return {mask_from_gray(soft), Origin::external_soft_mask};
}

double iou(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "iou of differently sized masks");
  }
  std::int64_t inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y) {
    const std::uint8_t* ra = a.row(y);
    const std::uint8_t* rb = b.row(y);
    for (int x = 0; x < a.width(); ++x) {
      inter += ra[x] & rb[x];
      uni += ra[x] | rb[x];
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> scale_grid(const SearchConfig& config) {
  if (!(config.scale_min > 0 && config.scale_max >= config.scale_min) ||
      config.scale_steps < 1) {
    throw Error(ErrorCode::InvalidArgument, "invalid scale grid");
  }
  std::vector<double> scales;
  const double ratio = config.scale_max / config.scale_min;
  for (int i = 0; i < config.scale_steps; ++i) {
    const double t = config.scale_steps == 1 ? 0.0 : double(i) / (config.scale_steps - 1);
    scales.push_back(config.scale_min * std::pow(ratio, t));
  }
  return scales;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int source_index(int x, double scale) {
  return static_cast<int>(std::floor((x + 0.5) / scale));
}

// Generated mask resampled at one scale, cropped to its true pixels and
// positioned at (ox, oy) on the lattice (before translation).
struct ScaledMask {
  int ox = 0, oy = 0, w = 0, h = 0;
  std::vector<std::uint8_t> bits;  // h x w
  std::vector<int> row_count;
  std::vector<int> col_count;
  std::int64_t area = 0;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * w + x] != 0; }
};

ScaledMask scale_mask(const Mask& gen, const Box& box, double scale) {
  const int x_lo = static_cast<int>(std::floor(box.x * scale)) - 2;
  const int x_hi = static_cast<int>(std::ceil(box.right() * scale)) + 2;
  const int y_lo = static_cast<int>(std::floor(box.y * scale)) - 2;
  const int y_hi = static_cast<int>(std::ceil(box.bottom() * scale)) + 2;

  std::vector<int> src_x(x_hi - x_lo), src_y(y_hi - y_lo);
  for (int x = x_lo; x < x_hi; ++x) src_x[x - x_lo] = source_index(x, scale);
  for (int y = y_lo; y < y_hi; ++y) src_y[y - y_lo] = source_index(y, scale);

  int min_x = x_hi, max_x = x_lo - 1, min_y = y_hi, max_y = y_lo - 1;
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) {
      if (gen.at(src_x[x - x_lo], src_y[y - y_lo])) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  ScaledMask s;
  if (max_x < min_x) return s;
  s.ox = min_x;
  s.oy = min_y;
  s.w = max_x - min_x + 1;
  s.h = max_y - min_y + 1;
  s.bits.assign(static_cast<std::size_t>(s.w) * s.h, 0);
  s.row_count.assign(s.h, 0);
  s.col_count.assign(s.w, 0);
  for (int y = 0; y < s.h; ++y) {
    for (int x = 0; x < s.w; ++x) {
      if (gen.at(src_x[x + s.ox - x_lo], src_y[y + s.oy - y_lo])) {
        s.bits[static_cast<std::size_t>(y) * s.w + x] = 1;
        ++s.row_count[y];
        ++s.col_count[x];
      }
    }
    s.area += s.row_count[y];
  }
  return s;
}

constexpr int kWordBits = 64;

// Ground-truth mask packed into 64-bit words per row.
struct PackedMask {
  int width = 0, height = 0, words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<int> row_count;
  std::vector<int> col_count;
  std::int64_t area = 0;

  explicit PackedMask(const Mask& m)
      : width(m.width()), height(m.height()), words((m.width() + kWordBits - 1) / kWordBits),
        bits(static_cast<std::size_t>(words) * m.height(), 0), row_count(m.height(), 0),
        col_count(m.width(), 0) {
    for (int y = 0; y < height; ++y) {
      const std::uint8_t* row = m.row(y);
      for (int x = 0; x < width; ++x) {
        if (row[x]) {
          bits[static_cast<std::size_t>(y) * words + x / kWordBits] |=
              std::uint64_t{1} << (x % kWordBits);
          ++row_count[y];
          ++col_count[x];
        }
      }
      area += row_count[y];
    }
  }
  const std::uint64_t* row(int y) const {
    return bits.data() + static_cast<std::size_t>(y) * words;
  }
};

// 64 copies of a scaled mask, copy q shifted right by q bits, so that any
// placement column lines up with whole ground-truth words.
struct ShiftedCopies {
  int words = 0;
  int rows = 0;
  std::vector<std::uint64_t> bits;  // [q][row][word]

  explicit ShiftedCopies(const ScaledMask& s)
      : words((s.w + 2 * kWordBits - 1) / kWordBits), rows(s.h),
        bits(static_cast<std::size_t>(kWordBits) * s.h * words, 0) {
    for (int y = 0; y < s.h; ++y) {
      std::uint64_t* base = row(0, y);
      for (int x = 0; x < s.w; ++x) {
        if (s.at(x, y)) base[x / kWordBits] |= std::uint64_t{1} << (x % kWordBits);
      }
      for (int q = 1; q < kWordBits; ++q) {
        std::uint64_t* dst = row(q, y);
        dst[0] = base[0] << q;
        for (int i = 1; i < words; ++i) {
          dst[i] = (base[i] << q) | (base[i - 1] >> (kWordBits - q));
        }
      }
    }
  }
  std::uint64_t* row(int q, int y) {
    return bits.data() + (static_cast<std::size_t>(q) * rows + y) * words;
  }
  const std::uint64_t* row(int q, int y) const {
    return bits.data() + (static_cast<std::size_t>(q) * rows + y) * words;
  }
};

struct Candidate {
  int scale_index = -1;
  double abs_log_scale = 0;
  int tx = 0, ty = 0;
  std::int64_t inter = 0, uni = 1;

  bool valid() const { return scale_index >= 0; }
};

// Strict "a is preferred over b".
bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid()) return a.valid();
  if (!a.valid()) return false;
  const std::int64_t lhs = a.inter * b.uni;
  const std::int64_t rhs = b.inter * a.uni;
  if (lhs != rhs) return lhs > rhs;
  if (a.abs_log_scale != b.abs_log_scale) return a.abs_log_scale < b.abs_log_scale;
  const int ma = std::abs(a.tx) + std::abs(a.ty);
  const int mb = std::abs(b.tx) + std::abs(b.ty);
  if (ma != mb) return ma < mb;
  if (a.scale_index != b.scale_index) return a.scale_index < b.scale_index;
  if (a.ty != b.ty) return a.ty < b.ty;
  return a.tx < b.tx;
}

// Projection upper bounds on the intersection, tabulated per offset.
class ProjectionBound {
 public:
  ProjectionBound() = default;
  ProjectionBound(std::vector<int> moving, std::vector<int> fixed, int origin, int lo, int hi)
      : moving_(std::move(moving)), fixed_(std::move(fixed)), origin_(origin), lo_(lo) {
    table_.resize(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
    for (int t = lo; t <= hi; ++t) table_[t - lo] = compute(t);
  }

  std::int64_t operator()(int t) const {
    const std::int64_t i = static_cast<std::int64_t>(t) - lo_;
    if (i >= 0 && i < static_cast<std::int64_t>(table_.size())) return table_[i];
    return compute(t);
  }

 private:
  std::int64_t compute(int t) const {
    const int r0 = origin_ + t;
    const int begin = std::max(0, -r0);
    const int end = std::min(static_cast<int>(moving_.size()), static_cast<int>(fixed_.size()) - r0);
    std::int64_t bound = 0;
    for (int r = begin; r < end; ++r) bound += std::min(moving_[r], fixed_[r0 + r]);
    return bound;
  }

  std::vector<int> moving_;
  std::vector<int> fixed_;
  int origin_ = 0;
  int lo_ = 0;
  std::vector<std::int64_t> table_;
};

class ScaleSearch {
 public:
  ScaleSearch(const PackedMask& gt, const Box& gt_box, ScaledMask scaled, int index,
              double scale, int margin)
      : gt_(gt), gt_box_(gt_box), s_(std::move(scaled)), copies_(s_), index_(index),
        abs_log_(std::abs(std::log(scale))) {
    tx_min_ = gt_box.x - s_.w - s_.ox + 1;
    tx_max_ = gt_box.right() - s_.ox - 1;
    ty_min_ = gt_box.y - s_.h - s_.oy + 1;
    ty_max_ = gt_box.bottom() - s_.oy - 1;
    rows_ = ProjectionBound(s_.row_count, gt_.row_count, s_.oy, ty_min_ - margin,
                            ty_max_ + margin);
    cols_ = ProjectionBound(s_.col_count, gt_.col_count, s_.ox, tx_min_ - margin,
                            tx_max_ + margin);
  }

  // False when an intersection of `bound` provably cannot beat `bar`.
  bool may_beat(std::int64_t bound, const Candidate& bar) const {
    if (!bar.valid()) return bound > 0;
    const std::int64_t ub_union = s_.area + gt_.area - bound;
    return bound * bar.uni >= bar.inter * ub_union;
  }

  // Evaluate unless the projection bounds prove it cannot beat `bar`.
  Candidate evaluate(int tx, int ty, const Candidate& bar) const {
    if (bar.valid() && !may_beat(std::min(rows_(ty), cols_(tx)), bar)) return {};
    const int r0 = s_.oy + ty;
    const int y_begin = std::max(0, -r0);
    const int y_end = std::min(s_.h, gt_.height - r0);
    if (y_begin >= y_end) return {};

    const int c0 = s_.ox + tx;
    const std::int64_t k = floor_div(c0, kWordBits);
    const int q = static_cast<int>(c0 - k * kWordBits);
    const int i_begin = static_cast<int>(std::max<std::int64_t>(0, -k));
    const int i_end = static_cast<int>(std::min<std::int64_t>(copies_.words, gt_.words - k));
    std::int64_t inter = 0;
    for (int r = y_begin; r < y_end; ++r) {
      const std::uint64_t* srow = copies_.row(q, r);
      const std::uint64_t* grow = gt_.row(r0 + r);
      for (int i = i_begin; i < i_end; ++i) {
        inter += std::popcount(srow[i] & grow[k + i]);
      }
    }
    Candidate c;
    c.scale_index = index_;
    c.abs_log_scale = abs_log_;
    c.tx = tx;
    c.ty = ty;
    c.inter = inter;
    c.uni = s_.area + gt_.area - inter;
    return c;
  }

  // Best placement on the stride grid (multiples of `stride`).
  Candidate coarse(int stride) const {
    const auto first = [stride](int lo) {
      return static_cast<int>(floor_div(lo + stride - 1, stride) * stride);
    };
    // Seed with the centred placement so the bound prunes early; it also
    // covers ranges narrower than the stride.
    const int cx = std::clamp(
        static_cast<int>(std::lround(gt_box_.center_x() - (s_.ox + s_.w / 2.0))),
        tx_min_, tx_max_);
    const int cy = std::clamp(
        static_cast<int>(std::lround(gt_box_.center_y() - (s_.oy + s_.h / 2.0))),
        ty_min_, ty_max_);
    Candidate best = evaluate(cx, cy, {});

    for (int ty = first(ty_min_); ty <= ty_max_; ty += stride) {
      if (best.valid() && !may_beat(rows_(ty), best)) continue;
      for (int tx = first(tx_min_); tx <= tx_max_; tx += stride) {
        const Candidate c = evaluate(tx, ty, best);
        if (better(c, best)) best = c;
      }
    }
    return best;
  }

  void refine(const Candidate& around, int radius, Candidate& best) const {
    for (int ty = around.ty - radius; ty <= around.ty + radius; ++ty) {
      if (best.valid() && !may_beat(rows_(ty), best)) continue;
      for (int tx = around.tx - radius; tx <= around.tx + radius; ++tx) {
        const Candidate c = evaluate(tx, ty, best);
        if (better(c, best)) best = c;
      }
    }
  }

 private:
  const PackedMask& gt_;
  Box gt_box_;
  ScaledMask s_;
  ShiftedCopies copies_;
  int index_;
  double abs_log_;
  int tx_min_ = 0, tx_max_ = 0, ty_min_ = 0, ty_max_ = 0;
  ProjectionBound rows_, cols_;
};

}  // namespace

double aligned_iou(const Mask& gen, const Mask& gt, double scale, int tx, int ty) {
  const Box box = tight_bbox(gen);
  const ScaledMask s = scale_mask(gen, box, scale);
  const std::int64_t gt_area = static_cast<std::int64_t>(gt.count());
  std::int64_t inter = 0;
  for (int y = 0; y < s.h; ++y) {
    for (int x = 0; x < s.w; ++x) {
      if (s.at(x, y) && gt.at(x + s.ox + tx, y + s.oy + ty)) ++inter;
    }
  }
  const std::int64_t uni = s.area + gt_area - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Mask transform_mask(const Mask& gen, double scale, int tx, int ty, const Box& frame) {
  Mask out(frame.w, frame.h);
  for (int y = 0; y < frame.h; ++y) {
    const int sy = source_index(frame.y + y - ty, scale);
    for (int x = 0; x < frame.w; ++x) {
      if (gen.at(source_index(frame.x + x - tx, scale), sy)) out.set(x, y);
    }
  }
  return out;
}

AlignmentResult align_max_iou(const Mask& gen, const Mask& gt, const SearchConfig& config) {
  if (config.coarse_stride < 1 || config.refine_radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid search strides");
  }
  const Box gen_box = tight_bbox(gen);
  const Box gt_box = tight_bbox(gt);
  const PackedMask packed(gt);
  const std::vector<double> scales = scale_grid(config);

  std::vector<ScaleSearch> searches;
  searches.reserve(scales.size());
  std::vector<Candidate> coarse;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    ScaledMask scaled = scale_mask(gen, gen_box, scales[i]);
    if (scaled.area == 0) continue;
    searches.emplace_back(packed, gt_box, std::move(scaled), static_cast<int>(i), scales[i],
                          config.refine_radius);
    coarse.push_back(searches.back().coarse(config.coarse_stride));
  }
  if (searches.empty()) throw Error(ErrorCode::EmptyMask, "generated mask vanished");

  Candidate best;
  for (const Candidate& c : coarse) {
    if (better(c, best)) best = c;
  }
  if (config.coarse_stride > 1 && config.refine_radius > 0) {
    // Refine the most promising scales first so the bound bites sooner.
    std::vector<std::size_t> order(searches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return better(coarse[a], coarse[b]); });
    for (std::size_t i : order) {
      if (coarse[i].valid()) searches[i].refine(coarse[i], config.refine_radius, best);
    }
  }

  AlignmentResult result;
  result.scale = scales[best.scale_index];
  result.tx = best.tx;
  result.ty = best.ty;
  result.intersection = best.inter;
  result.union_area = best.uni;
  result.iou = static_cast<double>(best.inter) / static_cast<double>(best.uni);
  return result;
}

}  // namespace fontsynth
