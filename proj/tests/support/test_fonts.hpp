#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fontsynth/error.hpp"
#include "fontsynth/eval_harness.hpp"
#include "fontsynth/glyph_render.hpp"

#ifndef FONTSYNTH_TEST_FONT_DIRS
#define FONTSYNTH_TEST_FONT_DIRS "/usr/share/fonts/truetype"
#endif

namespace fontsynth::testing {

/// FONTSYNTH_TEST_FONT_DIRS (colon separated) from the environment, else the
/// directories baked in at configure time.
inline std::vector<std::filesystem::path> test_font_dirs() {
  const char* env = std::getenv("FONTSYNTH_TEST_FONT_DIRS");
  std::string_view list = env && *env ? env : FONTSYNTH_TEST_FONT_DIRS;
  std::vector<std::filesystem::path> dirs;
  while (!list.empty()) {
    const auto colon = list.find(':');
    const auto item = list.substr(0, colon);
    if (!item.empty()) dirs.emplace_back(item);
    list = colon == std::string_view::npos ? std::string_view{} : list.substr(colon + 1);
  }
  return dirs;
}

inline bool symbol_font(std::string_view stem) {
  static constexpr std::string_view kSkip[] = {
      "cmex", "cmsy", "cmmi", "STIXNonUni", "STIXSiz", "Display", "KaTeX_AMS",
      "KaTeX_Caligraphic", "KaTeX_Script", "KaTeX_Size", "KaTeX_Math", "KaTeX_Fraktur",
      "hb-test", "pdf"};
  return std::any_of(std::begin(kSkip), std::end(kSkip),
                     [&](std::string_view s) { return stem.find(s) != std::string_view::npos; });
}

/// Loadable text fonts covering a-z, sorted by font id.
inline const std::vector<FontAsset>& latin_fonts() {
  static const std::vector<FontAsset> fonts = [] {
    const auto dirs = test_font_dirs();
    const FontRegistry registry = FontRegistry::scan(dirs);
    std::vector<FontAsset> out;
    for (const auto& [id, path] : registry.entries()) {
      if (symbol_font(id)) continue;
      try {
        FontAsset font = load_font(path, id);
        bool ok = true;
        for (char32_t c = U'a'; c <= U'z' && ok; ++c) ok = font.covers(c);
        if (ok) out.push_back(std::move(font));
      } catch (const Error&) {
      }
    }
    return out;
  }();
  return fonts;
}

/// Family prefix used to pick visibly different font pairs: the id up to the
/// first '-', with trailing style words removed.
inline std::string family_of(const std::string& id) {
  std::string f = id.substr(0, id.find_first_of("-", 1));
  for (bool stripped = true; stripped;) {
    stripped = false;
    for (std::string_view style : {"Oblique", "Italic", "Bold", "Bol", "Ita", "Mono"}) {
      if (f.size() > style.size() && f.ends_with(style)) {
        f.erase(f.size() - style.size());
        stripped = true;
      }
    }
  }
  return f;
}

}  // namespace fontsynth::testing
