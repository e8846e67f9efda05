#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/glyph_render.hpp"
#include "fontsynth/png_io.hpp"

namespace fontsynth::testing {

/// An evaluation directory whose "generated" masks are the ground-truth
/// renders themselves, with transcripts equal to the words.
struct IdentityFixture {
  std::filesystem::path manifest;
  std::filesystem::path transcripts;
  std::vector<EvalSample> samples;
};

inline IdentityFixture make_identity_fixture(const std::filesystem::path& dir,
                                             const std::vector<FontAsset>& fonts,
                                             const std::vector<std::string>& words,
                                             const RenderOptions& render = {}) {
  IdentityFixture fx;
  std::filesystem::create_directories(dir / "masks");
  fx.transcripts = dir / "transcripts.jsonl";
  std::ofstream transcripts(fx.transcripts);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const FontAsset& font = fonts[i % fonts.size()];
    std::string index = std::to_string(i);
    index.insert(0, index.size() < 3 ? 3 - index.size() : 0, '0');
    EvalSample s;
    s.sample_id = font.font_id() + "_" + index;
    s.font_id = font.font_id();
    s.word = words[i];
    s.prompt = "A sign reading '" + words[i] + "'";
    s.complexity = Complexity::simple;
    s.gen_mask = "masks/" + s.sample_id + ".png";
    write_mask_png(dir / s.gen_mask, render_word(s.word, font, render).mask);
    transcripts << "{\"sample_id\": \"" << s.sample_id << "\", \"predicted\": \"" << s.word
                << "\"}\n";
    fx.samples.push_back(std::move(s));
  }
  fx.manifest = dir / "eval.jsonl";
  write_eval_manifest(fx.manifest, fx.samples);
  return fx;
}

}  // namespace fontsynth::testing
