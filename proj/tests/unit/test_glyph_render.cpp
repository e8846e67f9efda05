#include <doctest.h>

#include <cmath>
#include <fstream>

#include "fontsynth/glyph_render.hpp"
#include "fontsynth/png_io.hpp"
#include "test_fonts.hpp"
#include "test_util.hpp"

using namespace fontsynth;
using fontsynth::testing::error_code_of;

namespace {

const FontAsset& sans() {
  static const FontAsset font = [] {
    for (const auto& f : testing::latin_fonts()) {
      if (f.font_id() == "DejaVuSans") return f;
    }
    REQUIRE_MESSAGE(!testing::latin_fonts().empty(), "no test fonts found");
    return testing::latin_fonts().front();
  }();
  return font;
}

// Recompute the bbox independently of tight_bbox.
Box scan_bbox(const Mask& m) {
  int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m(x, y)) {
        x0 = std::min(x0, x), y0 = std::min(y0, y);
        x1 = std::max(x1, x), y1 = std::max(y1, y);
      }
    }
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace

TEST_CASE("tight_bbox examples") {
  Mask one(32, 32);
  one.set(10, 20);
  CHECK(tight_bbox(one) == Box{10, 20, 1, 1});

  CHECK(tight_bbox(Mask(8, 8, true)) == Box{0, 0, 8, 8});

  Mask two(16, 16);
  two.set(0, 0);
  two.set(7, 3);
  CHECK(tight_bbox(two) == Box{0, 0, 8, 4});

  CHECK(error_code_of([] { tight_bbox(Mask(4, 4)); }) == ErrorCode::EmptyMask);
}

TEST_CASE("load_font populates the asset") {
  const FontAsset& font = sans();
  CHECK(font.units_per_em() > 0);
  CHECK(font.covers(U'q'));
  CHECK(std::is_sorted(font.glyph_coverage().begin(), font.glyph_coverage().end()));
  CHECK_FALSE(font.font_id().empty());
}

TEST_CASE("load_font rejects corrupt files") {
  const auto dir = testing::scratch_dir("glyph_render");
  const std::string bytes = testing::read_file(sans().source_path());

  testing::write_file(dir / "truncated.ttf", bytes.substr(0, 200));
  CHECK(error_code_of([&] { load_font(dir / "truncated.ttf"); }) == ErrorCode::UnreadableFont);

  testing::write_file(dir / "garbage.ttf", std::string(4096, 'x'));
  CHECK(error_code_of([&] { load_font(dir / "garbage.ttf"); }) == ErrorCode::UnreadableFont);

  CHECK(error_code_of([&] { load_font(dir / "missing.ttf"); }) == ErrorCode::UnreadableFont);
}

TEST_CASE("render_word scale, centring and mask contract") {
  for (const char* word : {"quake", "inquiry", "HALT", "Wg"}) {
    CAPTURE(word);
    const GlyphRender g = render_word(word, sans(), {512, 0.8});
    const Box box = scan_bbox(g.mask);
    CHECK(box == g.bbox);
    CHECK(std::abs(std::max(box.w, box.h) - 410) <= 1);
    CHECK(std::abs(box.center_x() - 256.0) <= 1.0);
    CHECK(std::abs(box.center_y() - 256.0) <= 1.0);
    for (int y = 0; y < 512; ++y) {
      for (int x = 0; x < 512; ++x) {
        REQUIRE(g.mask(x, y) == (g.canvas(x, y) <= 127));
      }
    }
    // Corners of the canvas are far from any glyph.
    CHECK(g.canvas(0, 0) == 255);
    CHECK(g.canvas(511, 511) == 255);
  }
}

TEST_CASE("render_word honours canvas size and fill ratio") {
  const GlyphRender g = render_word("quake", sans(), {300, 0.5});
  CHECK(g.canvas.width() == 300);
  CHECK(std::abs(std::max(g.bbox.w, g.bbox.h) - 150) <= 1);
}

TEST_CASE("render_word is deterministic") {
  const GlyphRender a = render_word(".", sans());
  const GlyphRender b = render_word(".", sans());
  CHECK(a.canvas == b.canvas);
  CHECK(a.mask == b.mask);
  CHECK(a.bbox == b.bbox);
}

TEST_CASE("render_word errors") {
  CHECK(error_code_of([] { render_word("日本", sans()); }) == ErrorCode::MissingGlyph);
  CHECK(error_code_of([] { render_word("", sans()); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { render_word("abc", sans(), {512, 0.0}); }) ==
        ErrorCode::InvalidArgument);
  // A very long word squeezed into a small canvas leaves glyphs too short.
  CHECK(error_code_of([] { render_word(std::string(200, 'm'), sans(), {64, 0.8}); }) ==
        ErrorCode::WordTooLong);
}

TEST_CASE("every test font renders a word") {
  for (const auto& font : testing::latin_fonts()) {
    CAPTURE(font.font_id());
    const GlyphRender g = render_word("quake", font);
    CHECK(std::abs(std::max(g.bbox.w, g.bbox.h) - 410) <= 1);
  }
}

TEST_CASE("png round trip") {
  const auto dir = testing::scratch_dir("png");
  const GlyphRender g = render_word("quake", sans(), {128, 0.8});
  write_png(dir / "c.png", g.canvas);
  write_mask_png(dir / "m.png", g.mask);
  CHECK(read_png_gray(dir / "c.png") == g.canvas);
  CHECK(read_mask_png(dir / "m.png") == g.mask);
  CHECK(error_code_of([&] { read_png_gray(dir / "nope.png"); }) == ErrorCode::IoError);
}
