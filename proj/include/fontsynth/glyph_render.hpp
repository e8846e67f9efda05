#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fontsynth/image.hpp"

namespace fontsynth {

/// A parsed scalable font. Cheap to copy; immutable after loading and safe
/// to share between threads.
class FontAsset {
 public:
  const std::string& font_id() const;
  const std::filesystem::path& source_path() const;
  int units_per_em() const;

  /// Sorted code points the font maps to a glyph.
  const std::vector<char32_t>& glyph_coverage() const;
  bool covers(char32_t code_point) const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

 private:
  friend FontAsset load_font(const std::filesystem::path&, std::string);
  explicit FontAsset(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Throws UnreadableFont for corrupt or unsupported files and EmptyFont when
/// no mapped glyph has an outline. `font_id` defaults to the file stem.
FontAsset load_font(const std::filesystem::path& path, std::string font_id = {});

struct GlyphRender {
  std::string word;
  std::string font_id;
  GrayImage canvas;  // 0 = ink, 255 = paper
  Mask mask;         // canvas <= 127
  Box bbox;          // tight box of mask
};

struct RenderOptions {
  int canvas_size = 512;
  double fill_ratio = 0.8;
};

/// Render `word` (UTF-8) on a single line as black glyphs centred on a white
/// square canvas. The tight glyph box's larger side is scaled to
/// round(fill_ratio * canvas_size) px (+-1).
GlyphRender render_word(std::string_view word, const FontAsset& font,
                        const RenderOptions& options = {});

/// UTF-8 to code points; throws InvalidArgument on malformed input.
std::u32string decode_utf8(std::string_view text);

}  // namespace fontsynth
