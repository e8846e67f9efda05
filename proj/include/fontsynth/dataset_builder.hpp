#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fontsynth/glyph_render.hpp"
#include "fontsynth/scene_compose.hpp"

namespace fontsynth {

struct WordDictionary {
  std::vector<std::string> words;
  std::size_t min_len = 4;
  std::size_t max_len = 7;

  /// Throws SchemaViolation on bad length, non-ASCII-letter or repeated
  /// words.
  void validate() const;

  /// One word per line; blank lines and surrounding whitespace ignored.
  static WordDictionary load(const std::filesystem::path& path);
};

/// Throws SplitOverlap if any word appears in both dictionaries.
void check_disjoint(const WordDictionary& train, const WordDictionary& eval);

/// k distinct words, deterministic per (font_id, seed). Throws
/// DictionaryTooSmall.
std::vector<std::string> sample_words(const WordDictionary& dict, std::string_view font_id,
                                      std::size_t k, std::uint64_t seed);

enum class Stage { text_only, scene_text };
enum class PairingMode { different, same, mixed_1_to_3 };

std::string_view to_string(Stage stage);
std::string_view to_string(PairingMode mode);
/// Throw SchemaViolation on unknown names.
Stage parse_stage(std::string_view name);
PairingMode parse_pairing_mode(std::string_view name);

struct DatasetPair {
  std::string reference_path;
  std::string target_path;
  std::string font_id;
  std::string ref_word;
  std::string target_word;
  Stage stage = Stage::text_only;

  friend bool operator==(const DatasetPair&, const DatasetPair&) = default;
};

struct RenderItem {
  std::string path;
  std::string word;
};

/// Everything rendered for one font. References always come from text_only.
struct FontRenders {
  std::string font_id;
  std::vector<RenderItem> text_only;
  std::vector<RenderItem> scene_text;
};

/// One pair per target image of `stage`. The reference is a text-only
/// render of the same font: another word (different), the same word (same),
/// or same for round(N / 4) targets chosen by a seeded global permutation and
/// different otherwise (mixed_1_to_3). Throws InsufficientWordsForFont.
std::vector<DatasetPair> build_pairs(std::span<const FontRenders> renders, Stage stage,
                                     PairingMode mode, std::uint64_t seed);

/// JSONL, one pair per line after a '#' header line.
std::size_t write_manifest(const std::filesystem::path& path,
                           std::span<const DatasetPair> pairs);
/// Throws SchemaViolation on missing fields or bad enum values.
std::vector<DatasetPair> read_manifest(const std::filesystem::path& path);

enum class Complexity { simple, moderate, complex };
std::string_view to_string(Complexity c);
Complexity parse_complexity(std::string_view name);

struct PromptTemplate {
  std::string text;
  Complexity complexity = Complexity::simple;

  static constexpr std::string_view kPlaceholder = "<*>";
  /// Throws MalformedTemplate unless the placeholder occurs exactly once.
  void validate() const;
  std::string fill(std::string_view word) const;
};

/// JSONL {"text", "complexity"}.
std::vector<PromptTemplate> read_templates(const std::filesystem::path& path);

/// One evaluation sample: a prompt to generate and the glyph it should show.
struct EvalSample {
  std::string sample_id;
  std::string font_id;
  std::string word;
  std::string prompt;
  std::optional<Complexity> complexity;
  std::string gen_mask;  // path of the segmented generated glyph

  friend bool operator==(const EvalSample&, const EvalSample&) = default;
};

/// For each font and each complexity level present in `templates`,
/// words_per_font templates of that level (without replacement while they
/// last), each filled with a distinct dictionary word. Sample ids are
/// <font>_<NNN>; gen_mask defaults to "masks/<sample_id>.png".
std::vector<EvalSample> expand_prompts(std::span<const PromptTemplate> templates,
                                       std::span<const std::string> font_ids,
                                       const WordDictionary& dict,
                                       std::size_t words_per_font, std::uint64_t seed);

std::size_t write_eval_manifest(const std::filesystem::path& path,
                                std::span<const EvalSample> samples);
/// Throws ManifestError on malformed lines or duplicate sample ids.
std::vector<EvalSample> read_eval_manifest(const std::filesystem::path& path);

/// {"train": [font ids], "eval": [font ids]}; throws SplitOverlap if a font
/// is listed in both.
struct FontSplit {
  std::vector<std::string> train;
  std::vector<std::string> eval;

  static FontSplit load(const std::filesystem::path& path);
  void validate() const;
};

struct SceneSource {
  /// Background images are <dir>/<background_id>.png.
  std::filesystem::path background_dir;
  std::vector<QuadLabel> quads;
  /// Optional original prompt per background id.
  std::vector<std::pair<std::string, std::string>> prompts;
};

struct BuildOptions {
  std::vector<std::filesystem::path> fonts;
  WordDictionary dictionary;
  std::size_t words_per_font = 10;
  RenderOptions render;
  PairingMode pairing = PairingMode::different;
  std::optional<SceneSource> scenes;
  std::size_t scenes_per_font = 10;
  double margin = 0.05;
  std::optional<FontSplit> split;  // only split.train fonts are built
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct BuildReport {
  std::size_t fonts_built = 0;
  std::size_t text_only_images = 0;
  std::size_t scene_images = 0;
  std::size_t text_only_pairs = 0;
  std::size_t scene_pairs = 0;
  /// Fonts dropped, with the reason (e.g. too few covered words).
  std::vector<std::pair<std::string, std::string>> skipped;
};

/// Render every font's sampled words (and scenes), then write
///   text_only/<font>/<word>.png, text_only/<font>/<word>_mask.png,
///   scene_text/<font>/<word>.{png,_mask.png,json},
///   pairs_text_only.jsonl, pairs_scene_text.jsonl
/// under `out_dir`. Output is byte-identical for identical inputs and seed.
BuildReport build_dataset(const BuildOptions& options, const std::filesystem::path& out_dir);

}  // namespace fontsynth
