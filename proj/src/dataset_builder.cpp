#include "fontsynth/dataset_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fontsynth/error.hpp"
#include "fontsynth/parallel.hpp"
#include "fontsynth/png_io.hpp"
#include "fontsynth/rng.hpp"

namespace fontsynth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  std::size_t b = 0, e = s.size();
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool ascii_letters(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot read " + path.string());
  return in;
}

// Partial Fisher-Yates: the first k entries of a seeded permutation of [0, n).
std::vector<std::size_t> permutation_prefix(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::string field_string(const ojson& obj, const char* key, std::size_t line, ErrorCode code) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(code, "line " + std::to_string(line) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

// Calls fn(json, line_number) for each non-blank, non-comment line.
template <typename Fn>
void for_each_jsonl(const fs::path& path, ErrorCode code, Fn&& fn) {
  std::ifstream in = open_in(path, code);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    ojson obj;
    try {
      obj = ojson::parse(t);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(code, path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(code, path.string() + " line " + std::to_string(number) + ": not an object");
    }
    fn(obj, number);
  }
}

}  // namespace

void WordDictionary::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& w : words) {
    if (w.size() < min_len || w.size() > max_len) {
      throw Error(ErrorCode::SchemaViolation, "word '" + w + "' has length outside [" +
                                                  std::to_string(min_len) + ", " +
                                                  std::to_string(max_len) + "]");
    }
    if (!ascii_letters(w)) {
      throw Error(ErrorCode::SchemaViolation, "word '" + w + "' is not ASCII letters");
    }
    if (!seen.insert(w).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate word '" + w + "'");
    }
  }
}

WordDictionary WordDictionary::load(const fs::path& path) {
  std::ifstream in = open_in(path, ErrorCode::IoError);
  WordDictionary dict;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (!w.empty()) dict.words.push_back(std::move(w));
  }
  dict.validate();
  return dict;
}

void check_disjoint(const WordDictionary& train, const WordDictionary& eval) {
  const std::unordered_set<std::string> a(train.words.begin(), train.words.end());
  for (const auto& w : eval.words) {
    if (a.count(w)) {
      throw Error(ErrorCode::SplitOverlap, "word '" + w + "' is in both dictionaries");
    }
  }
}

std::vector<std::string> sample_words(const WordDictionary& dict, std::string_view font_id,
                                      std::size_t k, std::uint64_t seed) {
  if (k > dict.words.size()) {
    throw Error(ErrorCode::DictionaryTooSmall,
                "requested " + std::to_string(k) + " words from a dictionary of " +
                    std::to_string(dict.words.size()));
  }
  Rng rng(stream_seed(seed, "words", font_id));
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i : permutation_prefix(dict.words.size(), k, rng)) {
    out.push_back(dict.words[i]);
  }
  return out;
}

std::string_view to_string(Stage stage) {
  return stage == Stage::text_only ? "text_only" : "scene_text";
}

std::string_view to_string(PairingMode mode) {
  switch (mode) {
    case PairingMode::different: return "different";
    case PairingMode::same: return "same";
    case PairingMode::mixed_1_to_3: return "mixed_1_to_3";
  }
  return "different";
}

Stage parse_stage(std::string_view name) {
  if (name == "text_only") return Stage::text_only;
  if (name == "scene_text") return Stage::scene_text;
  throw Error(ErrorCode::SchemaViolation, "unknown stage '" + std::string(name) + "'");
}

PairingMode parse_pairing_mode(std::string_view name) {
  if (name == "different") return PairingMode::different;
  if (name == "same") return PairingMode::same;
  if (name == "mixed_1_to_3" || name == "mixed") return PairingMode::mixed_1_to_3;
  throw Error(ErrorCode::SchemaViolation, "unknown pairing mode '" + std::string(name) + "'");
}

std::vector<DatasetPair> build_pairs(std::span<const FontRenders> renders, Stage stage,
                                     PairingMode mode, std::uint64_t seed) {
  std::size_t total = 0;
  for (const auto& f : renders) {
    total += (stage == Stage::text_only ? f.text_only : f.scene_text).size();
  }

  // Which targets (in global order) take a same-word reference.
  std::vector<char> same(total, mode == PairingMode::same ? 1 : 0);
  if (mode == PairingMode::mixed_1_to_3) {
    Rng rng(stream_seed(seed, "mixed-pairing", to_string(stage)));
    const auto n_same = static_cast<std::size_t>(std::llround(total / 4.0));
    for (std::size_t i : permutation_prefix(total, n_same, rng)) same[i] = 1;
  }

  std::vector<DatasetPair> pairs;
  pairs.reserve(total);
  std::size_t global = 0;
  for (const auto& font : renders) {
    const auto& targets = stage == Stage::text_only ? font.text_only : font.scene_text;
    Rng rng(stream_seed(seed, "pairing", font.font_id + "/" + std::string(to_string(stage))));
    for (const RenderItem& target : targets) {
      std::vector<const RenderItem*> pool;
      const bool want_same = same[global++] != 0;
      for (const RenderItem& ref : font.text_only) {
        if ((ref.word == target.word) == want_same) pool.push_back(&ref);
      }
      if (pool.empty()) {
        throw Error(ErrorCode::InsufficientWordsForFont,
                    "font '" + font.font_id + "' has no " +
                        (want_same ? "same-word" : "other-word") +
                        " text-only render to pair with '" + target.word + "'");
      }
      const RenderItem& ref = *pool[rng.below(pool.size())];
      pairs.push_back({ref.path, target.path, font.font_id, ref.word, target.word, stage});
    }
  }
  return pairs;
}

std::size_t write_manifest(const fs::path& path, std::span<const DatasetPair> pairs) {
  std::ofstream out = open_out(path);
  out << "# fontsynth pairs: ref, tgt, font, ref_word, tgt_word, stage\n";
  for (const auto& p : pairs) {
    ojson line;
    line["ref"] = p.reference_path;
    line["tgt"] = p.target_path;
    line["font"] = p.font_id;
    line["ref_word"] = p.ref_word;
    line["tgt_word"] = p.target_word;
    line["stage"] = to_string(p.stage);
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
  return pairs.size();
}

std::vector<DatasetPair> read_manifest(const fs::path& path) {
  std::vector<DatasetPair> pairs;
  constexpr auto code = ErrorCode::SchemaViolation;
  for_each_jsonl(path, code, [&](const ojson& obj, std::size_t n) {
    DatasetPair p;
    p.reference_path = field_string(obj, "ref", n, code);
    p.target_path = field_string(obj, "tgt", n, code);
    p.font_id = field_string(obj, "font", n, code);
    p.ref_word = field_string(obj, "ref_word", n, code);
    p.target_word = field_string(obj, "tgt_word", n, code);
    p.stage = parse_stage(field_string(obj, "stage", n, code));
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::string_view to_string(Complexity c) {
  switch (c) {
    case Complexity::simple: return "simple";
    case Complexity::moderate: return "moderate";
    case Complexity::complex: return "complex";
  }
  return "simple";
}

Complexity parse_complexity(std::string_view name) {
  if (name == "simple") return Complexity::simple;
  if (name == "moderate") return Complexity::moderate;
  if (name == "complex") return Complexity::complex;
  throw Error(ErrorCode::MalformedTemplate, "unknown complexity '" + std::string(name) + "'");
}

void PromptTemplate::validate() const {
  const std::size_t first = text.find(kPlaceholder);
  if (first == std::string::npos) {
    throw Error(ErrorCode::MalformedTemplate, "no placeholder in template: " + text);
  }
  if (text.find(kPlaceholder, first + 1) != std::string::npos) {
    throw Error(ErrorCode::MalformedTemplate, "several placeholders in template: " + text);
  }
}

std::string PromptTemplate::fill(std::string_view word) const {
  validate();
  std::string out = text;
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), word);
  return out;
}

std::vector<PromptTemplate> read_templates(const fs::path& path) {
  std::vector<PromptTemplate> out;
  constexpr auto code = ErrorCode::MalformedTemplate;
  for_each_jsonl(path, code, [&](const ojson& obj, std::size_t n) {
    PromptTemplate t;
    t.text = field_string(obj, "text", n, code);
    t.complexity = parse_complexity(field_string(obj, "complexity", n, code));
    t.validate();
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<EvalSample> expand_prompts(std::span<const PromptTemplate> templates,
                                       std::span<const std::string> font_ids,
                                       const WordDictionary& dict,
                                       std::size_t words_per_font, std::uint64_t seed) {
  if (templates.empty()) throw Error(ErrorCode::MalformedTemplate, "no prompt templates");
  for (const auto& t : templates) t.validate();

  // Templates grouped by complexity level, in enum order.
  std::map<Complexity, std::vector<std::size_t>> levels;
  for (std::size_t i = 0; i < templates.size(); ++i) levels[templates[i].complexity].push_back(i);

  std::vector<EvalSample> out;
  out.reserve(font_ids.size() * words_per_font * levels.size());
  for (const std::string& font : font_ids) {
    const auto words = sample_words(dict, font, words_per_font * levels.size(), seed);
    std::size_t next = 0;
    for (const auto& [level, members] : levels) {
      Rng rng(stream_seed(seed, "templates", font + "/" + std::string(to_string(level))));
      std::vector<std::size_t> picks;
      if (words_per_font <= members.size()) {
        picks = permutation_prefix(members.size(), words_per_font, rng);
      } else {
        for (std::size_t i = 0; i < words_per_font; ++i) picks.push_back(rng.below(members.size()));
      }
      for (std::size_t pick : picks) {
        const PromptTemplate& t = templates[members[pick]];
        const std::string& word = words[next];
        std::string index = std::to_string(next++);
        if (index.size() < 3) index.insert(0, 3 - index.size(), '0');
        EvalSample s;
        s.sample_id = font + "_" + index;
        s.font_id = font;
        s.word = word;
        s.prompt = t.fill(word);
        s.complexity = t.complexity;
        s.gen_mask = "masks/" + s.sample_id + ".png";
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

std::size_t write_eval_manifest(const fs::path& path, std::span<const EvalSample> samples) {
  std::ofstream out = open_out(path);
  out << "# fontsynth eval samples: sample_id, font, word, prompt, complexity, gen_mask\n";
  for (const auto& s : samples) {
    ojson line;
    line["sample_id"] = s.sample_id;
    line["font"] = s.font_id;
    line["word"] = s.word;
    line["prompt"] = s.prompt;
    if (s.complexity) line["complexity"] = to_string(*s.complexity);
    line["gen_mask"] = s.gen_mask;
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
  return samples.size();
}

std::vector<EvalSample> read_eval_manifest(const fs::path& path) {
  std::vector<EvalSample> out;
  std::unordered_set<std::string> ids;
  constexpr auto code = ErrorCode::ManifestError;
  for_each_jsonl(path, code, [&](const ojson& obj, std::size_t n) {
    EvalSample s;
    s.sample_id = field_string(obj, "sample_id", n, code);
    s.font_id = field_string(obj, "font", n, code);
    s.word = field_string(obj, "word", n, code);
    s.gen_mask = field_string(obj, "gen_mask", n, code);
    if (obj.contains("prompt")) s.prompt = field_string(obj, "prompt", n, code);
    if (obj.contains("complexity")) {
      try {
        s.complexity = parse_complexity(field_string(obj, "complexity", n, code));
      } catch (const Error& e) {
        throw Error(code, "line " + std::to_string(n) + ": " + e.what());
      }
    }
    if (s.word.empty()) throw Error(code, "line " + std::to_string(n) + ": empty word");
    if (!ids.insert(s.sample_id).second) {
      throw Error(code, "line " + std::to_string(n) + ": duplicate sample_id '" + s.sample_id + "'");
    }
    out.push_back(std::move(s));
  });
  return out;
}

FontSplit FontSplit::load(const fs::path& path) {
  std::ifstream in = open_in(path, ErrorCode::IoError);
  FontSplit split;
  try {
    const auto j = nlohmann::json::parse(in);
    split.train = j.at("train").get<std::vector<std::string>>();
    split.eval = j.at("eval").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  split.validate();
  return split;
}

void FontSplit::validate() const {
  const std::unordered_set<std::string> a(train.begin(), train.end());
  for (const auto& f : eval) {
    if (a.count(f)) throw Error(ErrorCode::SplitOverlap, "font '" + f + "' is in both splits");
  }
}

namespace {

struct FontJob {
  fs::path path;
  std::string font_id;
  FontRenders renders;
  std::size_t scenes = 0;
  std::string skipped;
};

std::string relative_path(const fs::path& p, const fs::path& base) {
  return p.lexically_relative(base).generic_string();
}

void build_font(FontJob& job, const BuildOptions& opt, const fs::path& out_dir,
                const std::vector<RgbImage>& backgrounds,
                const std::map<std::string, std::string>& prompts) {
  std::optional<FontAsset> loaded;
  try {
    loaded = load_font(job.path, job.font_id);
  } catch (const Error& e) {
    job.skipped = e.what();
    return;
  }
  const FontAsset& font = *loaded;

  // Only words the font can render are eligible.
  WordDictionary covered;
  for (const auto& w : opt.dictionary.words) {
    if (std::all_of(w.begin(), w.end(), [&](char c) { return font.covers(static_cast<unsigned char>(c)); })) {
      covered.words.push_back(w);
    }
  }
  if (covered.words.size() < opt.words_per_font) {
    job.skipped = "covers only " + std::to_string(covered.words.size()) + " dictionary words";
    return;
  }
  const auto words = sample_words(covered, job.font_id, opt.words_per_font, opt.seed);

  std::vector<GlyphRender> glyphs;
  try {
    for (const auto& w : words) glyphs.push_back(render_word(w, font, opt.render));
  } catch (const Error& e) {
    job.skipped = e.what();
    return;
  }

  const fs::path text_dir = out_dir / "text_only" / job.font_id;
  fs::create_directories(text_dir);
  for (const auto& g : glyphs) {
    const fs::path image = text_dir / (g.word + ".png");
    write_png(image, g.canvas);
    write_mask_png(text_dir / (g.word + "_mask.png"), g.mask);
    job.renders.text_only.push_back({relative_path(image, out_dir), g.word});
  }

  if (!opt.scenes || backgrounds.empty()) return;
  const fs::path scene_dir = out_dir / "scene_text" / job.font_id;
  fs::create_directories(scene_dir);
  for (std::size_t i = 0; i < opt.scenes_per_font; ++i) {
    const GlyphRender& glyph = glyphs[i % glyphs.size()];
    const std::string key = job.font_id + "/" + std::to_string(i);
    Rng pick(stream_seed(opt.seed, "background", key));
    const std::size_t b = pick.below(backgrounds.size());
    SceneSpec spec;
    spec.quad = opt.scenes->quads[b];
    spec.word = glyph.word;
    spec.color = sample_color(stream_seed(opt.seed, "color", key));
    spec.margin = opt.margin;
    if (auto it = prompts.find(spec.quad.background_id); it != prompts.end()) {
      spec.prompt = it->second;
    }
    spec.phrase_seed = stream_seed(opt.seed, "phrase", key);
    const SceneRender scene = compose_scene(backgrounds[b], glyph, spec);
    std::string name = std::to_string(i);
    if (name.size() < 2) name.insert(0, 1, '0');
    name = "s" + name + "_" + glyph.word;
    const fs::path image = scene_dir / (name + ".png");
    write_scene(image, scene_dir / (name + "_mask.png"), scene_dir / (name + ".json"), scene,
                spec, job.font_id);
    job.renders.scene_text.push_back({relative_path(image, out_dir), glyph.word});
  }
}

}  // namespace

BuildReport build_dataset(const BuildOptions& options, const fs::path& out_dir) {
  options.dictionary.validate();
  if (options.words_per_font == 0) {
    throw Error(ErrorCode::InvalidArgument, "words_per_font must be positive");
  }

  std::vector<FontJob> jobs;
  std::set<std::string> ids;
  std::unordered_set<std::string> allowed;
  if (options.split) {
    options.split->validate();
    allowed.insert(options.split->train.begin(), options.split->train.end());
  }
  for (const auto& path : options.fonts) {
    FontJob job;
    job.path = path;
    job.font_id = path.stem().string();
    if (options.split && !allowed.count(job.font_id)) continue;
    if (!ids.insert(job.font_id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate font id '" + job.font_id + "'");
    }
    job.renders.font_id = job.font_id;
    jobs.push_back(std::move(job));
  }
  std::sort(jobs.begin(), jobs.end(),
            [](const FontJob& a, const FontJob& b) { return a.font_id < b.font_id; });

  std::vector<RgbImage> backgrounds;
  std::map<std::string, std::string> prompts;
  if (options.scenes) {
    for (const auto& q : options.scenes->quads) {
      backgrounds.push_back(read_png_rgb(options.scenes->background_dir / (q.background_id + ".png")));
      validate_quad(q, backgrounds.back().width(), backgrounds.back().height());
    }
    prompts.insert(options.scenes->prompts.begin(), options.scenes->prompts.end());
  }

  fs::create_directories(out_dir);
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    build_font(jobs[i], options, out_dir, backgrounds, prompts);
  });

  BuildReport report;
  std::vector<FontRenders> renders;
  for (auto& job : jobs) {
    if (!job.skipped.empty()) {
      report.skipped.emplace_back(job.font_id, job.skipped);
      continue;
    }
    ++report.fonts_built;
    report.text_only_images += job.renders.text_only.size();
    report.scene_images += job.renders.scene_text.size();
    renders.push_back(std::move(job.renders));
  }

  const auto text_pairs = build_pairs(renders, Stage::text_only, options.pairing, options.seed);
  report.text_only_pairs = write_manifest(out_dir / "pairs_text_only.jsonl", text_pairs);
  if (options.scenes) {
    const auto scene_pairs = build_pairs(renders, Stage::scene_text, options.pairing, options.seed);
    report.scene_pairs = write_manifest(out_dir / "pairs_scene_text.jsonl", scene_pairs);
  }
  return report;
}

}  // namespace fontsynth
