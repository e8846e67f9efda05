#include "fontsynth/glyph_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "stb_truetype.h"

namespace fontsynth {

struct FontAsset::Impl {
  std::string font_id;
  std::filesystem::path source_path;
  std::vector<unsigned char> data;
  stbtt_fontinfo info{};
  int units_per_em = 0;
  std::vector<char32_t> coverage;
};

const std::string& FontAsset::font_id() const { return impl_->font_id; }
const std::filesystem::path& FontAsset::source_path() const {
  return impl_->source_path;
}
int FontAsset::units_per_em() const { return impl_->units_per_em; }
const std::vector<char32_t>& FontAsset::glyph_coverage() const {
  return impl_->coverage;
}
bool FontAsset::covers(char32_t code_point) const {
  return std::binary_search(impl_->coverage.begin(), impl_->coverage.end(),
                            code_point);
}

namespace {

std::uint16_t be16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}
std::uint32_t be32(const unsigned char* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 |
         std::uint32_t(p[2]) << 8 | p[3];
}

[[noreturn]] void unreadable(const std::filesystem::path& path,
                             const std::string& why) {
  throw Error(ErrorCode::UnreadableFont, path.string() + ": " + why);
}

// stb_truetype trusts every offset in the file; reject anything whose table
// directory points past the end of the buffer before handing it over.
void check_table_directory(const std::vector<unsigned char>& data, int offset,
                           const std::filesystem::path& path) {
  const std::size_t size = data.size();
  if (offset < 0 || static_cast<std::size_t>(offset) + 12 > size) {
    unreadable(path, "truncated offset table");
  }
  const unsigned char* base = data.data() + offset;
  const std::uint32_t version = be32(base);
  if (version != 0x00010000 && version != 0x4F54544F /* OTTO */ &&
      version != 0x74727565 /* true */) {
    unreadable(path, "not a TrueType/OpenType font");
  }
  const std::size_t num_tables = be16(base + 4);
  if (num_tables == 0 || offset + 12 + num_tables * 16 > size) {
    unreadable(path, "truncated table directory");
  }
  for (std::size_t i = 0; i < num_tables; ++i) {
    const unsigned char* rec = base + 12 + i * 16;
    const std::uint64_t table_offset = be32(rec + 8);
    const std::uint64_t table_length = be32(rec + 12);
    if (table_offset + table_length > size) {
      unreadable(path, "table extends past end of file");
    }
  }
}

std::vector<char32_t> enumerate_coverage(const FontAsset::Impl& font) {
  const stbtt_fontinfo& info = font.info;
  const unsigned char* data = font.data.data();
  const std::size_t size = font.data.size();
  std::vector<char32_t> out;
  if (info.index_map <= 0 || static_cast<std::size_t>(info.index_map) + 16 > size) {
    return out;
  }
  const unsigned char* sub = data + info.index_map;
  const std::uint16_t format = be16(sub);
  if (format == 12 || format == 13) {
    const std::uint64_t groups = be32(sub + 12);
    if (info.index_map + 16 + groups * 12 > size) return out;
    for (std::uint64_t i = 0; i < groups; ++i) {
      const unsigned char* g = sub + 16 + i * 12;
      const std::uint32_t first = be32(g);
      const std::uint32_t last = std::min<std::uint32_t>(be32(g + 4), 0x10FFFF);
      const std::uint32_t start_glyph = be32(g + 8);
      for (std::uint32_t c = first; c <= last && first <= last; ++c) {
        const std::uint32_t glyph =
            format == 12 ? start_glyph + (c - first) : start_glyph;
        if (glyph != 0) out.push_back(static_cast<char32_t>(c));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  // Formats 0/4/6 only address the BMP.
  for (int c = 0; c <= 0xFFFF; ++c) {
    if (stbtt_FindGlyphIndex(&info, c) != 0) out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

}  // namespace

FontAsset load_font(const std::filesystem::path& path, std::string font_id) {
  auto impl = std::make_shared<FontAsset::Impl>();
  impl->source_path = path;
  impl->font_id = font_id.empty() ? path.stem().string() : std::move(font_id);

  std::ifstream in(path, std::ios::binary);
  if (!in) unreadable(path, "cannot open file");
  impl->data.assign(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
  if (impl->data.size() < 12) unreadable(path, "file too short");

  const int offset = stbtt_GetFontOffsetForIndex(impl->data.data(), 0);
  check_table_directory(impl->data, offset, path);
  if (!stbtt_InitFont(&impl->info, impl->data.data(), offset)) {
    unreadable(path, "missing required tables");
  }
  impl->units_per_em = be16(impl->data.data() + impl->info.head + 18);
  if (impl->units_per_em <= 0) unreadable(path, "unitsPerEm is zero");

  impl->coverage = enumerate_coverage(*impl);
  const bool has_outline =
      std::any_of(impl->coverage.begin(), impl->coverage.end(), [&](char32_t c) {
        const int glyph = stbtt_FindGlyphIndex(&impl->info, static_cast<int>(c));
        return glyph != 0 && !stbtt_IsGlyphEmpty(&impl->info, glyph);
      });
  if (!has_outline) {
    throw Error(ErrorCode::EmptyFont, path.string() + ": no glyph outlines");
  }
  return FontAsset(std::move(impl));
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      throw Error(ErrorCode::InvalidArgument, "malformed UTF-8");
    }
    if (extra > 0 && i + extra >= text.size()) {
      throw Error(ErrorCode::InvalidArgument, "truncated UTF-8 sequence");
    }
    for (int k = 1; k <= extra; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw Error(ErrorCode::InvalidArgument, "malformed UTF-8");
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

namespace {

struct Layout {
  std::vector<int> glyphs;
  std::vector<double> pen;  // font units
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // ink extents, font units, y up
};

Layout layout_word(const stbtt_fontinfo& info, const std::u32string& cps) {
  Layout layout;
  double pen = 0;
  bool any_ink = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const int glyph = stbtt_FindGlyphIndex(&info, static_cast<int>(cps[i]));
    if (i > 0) pen += stbtt_GetGlyphKernAdvance(&info, layout.glyphs.back(), glyph);
    layout.glyphs.push_back(glyph);
    layout.pen.push_back(pen);
    int advance = 0, lsb = 0;
    stbtt_GetGlyphHMetrics(&info, glyph, &advance, &lsb);
    int gx0, gy0, gx1, gy1;
    if (stbtt_GetGlyphBox(&info, glyph, &gx0, &gy0, &gx1, &gy1) &&
        !stbtt_IsGlyphEmpty(&info, glyph)) {
      if (!any_ink) {
        layout.x0 = pen + gx0;
        layout.x1 = pen + gx1;
        layout.y0 = gy0;
        layout.y1 = gy1;
        any_ink = true;
      } else {
        layout.x0 = std::min(layout.x0, pen + gx0);
        layout.x1 = std::max(layout.x1, pen + gx1);
        layout.y0 = std::min<double>(layout.y0, gy0);
        layout.y1 = std::max<double>(layout.y1, gy1);
      }
    }
    pen += advance;
  }
  if (!any_ink) throw Error(ErrorCode::EmptyMask, "word has no visible glyph");
  return layout;
}

// Ink coverage (0..255) of the laid-out word at `scale` px per font unit.
GrayImage rasterize(const stbtt_fontinfo& info, const Layout& layout,
                    double scale) {
  struct Placed {
    int glyph, x, y, w, h;
    float shift;
  };
  std::vector<Placed> placed;
  int min_x = std::numeric_limits<int>::max(), min_y = min_x;
  int max_x = std::numeric_limits<int>::min(), max_y = max_x;
  for (std::size_t i = 0; i < layout.glyphs.size(); ++i) {
    const int glyph = layout.glyphs[i];
    if (stbtt_IsGlyphEmpty(&info, glyph)) continue;
    const double pen_px = (layout.pen[i] - layout.x0) * scale;
    const int ix = static_cast<int>(std::floor(pen_px));
    const auto shift = static_cast<float>(pen_px - ix);
    int bx0, by0, bx1, by1;
    stbtt_GetGlyphBitmapBoxSubpixel(&info, glyph, static_cast<float>(scale),
                                    static_cast<float>(scale), shift, 0.0f,
                                    &bx0, &by0, &bx1, &by1);
    if (bx1 <= bx0 || by1 <= by0) continue;
    placed.push_back({glyph, ix + bx0, by0, bx1 - bx0, by1 - by0, shift});
    min_x = std::min(min_x, ix + bx0);
    min_y = std::min(min_y, by0);
    max_x = std::max(max_x, ix + bx1);
    max_y = std::max(max_y, by1);
  }
  if (placed.empty()) throw Error(ErrorCode::EmptyMask, "word has no ink");

  GrayImage coverage(max_x - min_x, max_y - min_y, 0);
  std::vector<unsigned char> scratch;
  for (const Placed& p : placed) {
    scratch.assign(static_cast<std::size_t>(p.w) * p.h, 0);
    stbtt_MakeGlyphBitmapSubpixel(&info, scratch.data(), p.w, p.h, p.w,
                                  static_cast<float>(scale),
                                  static_cast<float>(scale), p.shift, 0.0f,
                                  p.glyph);
    for (int y = 0; y < p.h; ++y) {
      for (int x = 0; x < p.w; ++x) {
        auto& dst = coverage(p.x - min_x + x, p.y - min_y + y);
        dst = static_cast<std::uint8_t>(
            std::min(255, dst + scratch[static_cast<std::size_t>(y) * p.w + x]));
      }
    }
  }
  return coverage;
}

Box ink_box(const GrayImage& coverage) {
  Mask mask(coverage.width(), coverage.height());
  for (int y = 0; y < coverage.height(); ++y) {
    for (int x = 0; x < coverage.width(); ++x) {
      if (coverage(x, y) >= 128) mask.set(x, y);
    }
  }
  return tight_bbox(mask);
}

}  // namespace

GlyphRender render_word(std::string_view word, const FontAsset& font,
                        const RenderOptions& options) {
  if (word.empty()) throw Error(ErrorCode::InvalidArgument, "empty word");
  if (!(options.fill_ratio > 0.0 && options.fill_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fill_ratio must be in (0, 1]");
  }
  if (options.canvas_size < 8) {
    throw Error(ErrorCode::InvalidArgument, "canvas_size too small");
  }
  const std::u32string cps = decode_utf8(word);
  for (char32_t cp : cps) {
    if (!font.covers(cp)) {
      throw Error(ErrorCode::MissingGlyph,
                  "font '" + font.font_id() + "' has no glyph for U+" +
                      [cp] {
                        char buf[16];
                        std::snprintf(buf, sizeof buf, "%04X", unsigned(cp));
                        return std::string(buf);
                      }());
    }
  }

  const stbtt_fontinfo& info = font.impl().info;
  const Layout layout = layout_word(info, cps);
  const int size = options.canvas_size;
  const int target = static_cast<int>(std::lround(options.fill_ratio * size));
  const double extent = std::max(layout.x1 - layout.x0, layout.y1 - layout.y0);

  // Outline boxes include control points and anti-aliased fringe falls below
  // the mask threshold, so correct the scale against the measured mask box.
  double scale = target / extent;
  if ((layout.y1 - layout.y0) * scale < 4.0) {
    throw Error(ErrorCode::WordTooLong, "word too long for a " + std::to_string(size) + " px canvas");
  }
  GrayImage best;
  Box best_box;
  int best_error = std::numeric_limits<int>::max();
  for (int iteration = 0; iteration < 8; ++iteration) {
    GrayImage coverage = rasterize(info, layout, scale);
    const Box box = ink_box(coverage);
    const int measured = std::max(box.w, box.h);
    const int error = std::abs(measured - target);
    if (measured <= size && error < best_error) {
      best_error = error;
      best = std::move(coverage);
      best_box = box;
    }
    if (error == 0) break;
    scale *= static_cast<double>(target) / measured;
  }
  if (best.empty()) {
    throw Error(ErrorCode::InvalidArgument, "glyph does not fit the canvas");
  }
  if (best_box.h < 4) {
    throw Error(ErrorCode::WordTooLong,
                "scaled glyph height " + std::to_string(best_box.h) + " px");
  }

  const int offset_x = (size - best_box.w) / 2 - best_box.x;
  const int offset_y = (size - best_box.h) / 2 - best_box.y;
  GlyphRender out;
  out.word = std::string(word);
  out.font_id = font.font_id();
  out.canvas = GrayImage(size, size, 255);
  for (int y = 0; y < best.height(); ++y) {
    const int cy = y + offset_y;
    if (cy < 0 || cy >= size) continue;
    for (int x = 0; x < best.width(); ++x) {
      const int cx = x + offset_x;
      if (cx < 0 || cx >= size) continue;
      out.canvas(cx, cy) = static_cast<std::uint8_t>(255 - best(x, y));
    }
  }
  out.mask = mask_from_canvas(out.canvas);
  out.bbox = tight_bbox(out.mask);
  return out;
}

}  // namespace fontsynth
