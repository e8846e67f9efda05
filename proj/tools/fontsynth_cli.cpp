#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fontsynth/config.hpp"
#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/error.hpp"
#include "fontsynth/eval_harness.hpp"
#include "fontsynth/glyph_render.hpp"
#include "fontsynth/png_io.hpp"
#include "fontsynth/scene_compose.hpp"

namespace fs = std::filesystem;
using namespace fontsynth;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string config_path;

  Config config() const { return config_path.empty() ? Config{} : Config::load(config_path); }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Font files given directly or found under directories, sorted by path.
std::vector<fs::path> collect_fonts(const std::vector<std::string>& inputs) {
  std::vector<fs::path> dirs, out;
  for (const auto& s : inputs) {
    if (fs::is_directory(s)) {
      dirs.emplace_back(s);
    } else {
      out.emplace_back(s);
    }
  }
  const FontRegistry registry = FontRegistry::scan(dirs);
  for (const auto& [id, path] : registry.entries()) out.push_back(path);
  return out;
}

std::vector<std::pair<std::string, std::string>> read_prompt_map(const fs::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto j = nlohmann::json::parse(slurp(path));
  for (const auto& [k, v] : j.items()) out.emplace_back(k, v.get<std::string>());
  return out;
}

Rgb parse_color(const std::string& hex) {
  std::string h = hex[0] == '#' ? hex.substr(1) : hex;
  if (h.size() != 6 || h.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "color must be RRGGBB hex");
  }
  const unsigned long v = std::stoul(h, nullptr, 16);
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Font dataset synthesis and glyph evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Run seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config file");

  // render
  auto* render = app.add_subcommand("render", "Render a word as black glyphs on white");
  std::string r_font, r_word, r_out;
  render->add_option("--font", r_font, "Font file")->required();
  render->add_option("--word", r_word, "Word to render")->required();
  render->add_option("--out", r_out, "Output prefix (<out>.png, <out>_mask.png, <out>.json)")
      ->required();

  // compose
  auto* compose = app.add_subcommand("compose", "Composite a word into a labeled background");
  std::string c_font, c_word, c_bg, c_quads, c_out, c_prompt, c_color;
  compose->add_option("--font", c_font)->required();
  compose->add_option("--word", c_word)->required();
  compose->add_option("--background", c_bg, "Background PNG")->required();
  compose->add_option("--quads", c_quads, "QuadLabel JSON; the entry matching the background "
                                          "file stem is used")->required();
  compose->add_option("--prompt", c_prompt, "Original background prompt");
  compose->add_option("--color", c_color, "RRGGBB; sampled from the seed when omitted");
  compose->add_option("--out", c_out, "Output prefix")->required();

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Render fonts and write pair manifests");
  std::vector<std::string> b_fonts;
  std::string b_words, b_eval_words, b_split, b_bg_dir, b_quads, b_prompts, b_out, b_pairing;
  build->add_option("--fonts", b_fonts, "Font files or directories")->required();
  build->add_option("--words", b_words, "Training dictionary")->required();
  build->add_option("--eval-words", b_eval_words, "Evaluation dictionary (checked disjoint)");
  build->add_option("--split", b_split, "Font split JSON; only train fonts are built");
  build->add_option("--backgrounds", b_bg_dir, "Directory of <background_id>.png");
  build->add_option("--quads", b_quads, "QuadLabel JSON for the backgrounds");
  build->add_option("--prompts", b_prompts, "JSON object background_id -> prompt");
  build->add_option("--pairing", b_pairing, "different | same | mixed_1_to_3");
  build->add_option("--out", b_out, "Output directory")->required();

  // expand-prompts
  auto* expand = app.add_subcommand("expand-prompts", "Expand prompt templates per font");
  std::vector<std::string> e_fonts;
  std::string e_templates, e_words, e_out, e_split;
  std::size_t e_per_font = 10;
  expand->add_option("--templates", e_templates, "Template JSONL")->required();
  expand->add_option("--fonts", e_fonts, "Font files or directories (ids are file stems)")
      ->required();
  expand->add_option("--words", e_words, "Evaluation dictionary")->required();
  expand->add_option("--split", e_split, "Font split JSON; only eval fonts are used");
  expand->add_option("--per-font", e_per_font, "Prompts per font and complexity level")->capture_default_str();
  expand->add_option("--out", e_out, "Eval manifest JSONL")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score generated glyph masks");
  std::string v_manifest, v_masks, v_transcripts, v_clip, v_siglip, v_lpips, v_out;
  std::vector<std::string> v_font_dirs;
  evaluate->add_option("--manifest", v_manifest, "Eval manifest JSONL")->required();
  evaluate->add_option("--masks-dir", v_masks, "Base for relative gen_mask paths");
  evaluate->add_option("--font-dir", v_font_dirs, "Directories holding <font_id> font files")
      ->required();
  evaluate->add_option("--transcripts", v_transcripts, "OCR transcripts JSONL");
  evaluate->add_option("--clip", v_clip, "CLIP embedding JSONL");
  evaluate->add_option("--siglip", v_siglip, "SigLIP embedding JSONL");
  evaluate->add_option("--lpips", v_lpips, "LPIPS JSONL");
  evaluate->add_option("--out", v_out, "Output directory")->required();

  // filter
  auto* filter = app.add_subcommand("filter", "Split records by the quality filter");
  std::string f_records, f_kept, f_rejected;
  filter->add_option("--records", f_records)->required();
  filter->add_option("--kept", f_kept)->required();
  filter->add_option("--rejected", f_rejected);

  // report
  auto* rep = app.add_subcommand("report", "Render summaries as a table");
  std::vector<std::string> p_summaries;
  std::string p_format = "markdown", p_out;
  rep->add_option("--summary", p_summaries, "summary.json, optionally label=path")->required();
  rep->add_option("--format", p_format, "json | csv | markdown")->capture_default_str();
  rep->add_option("--out", p_out, "Write to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config config = g.config();

    if (*render) {
      const FontAsset font = load_font(r_font);
      const GlyphRender glyph = render_word(r_word, font, config.render);
      write_png(r_out + ".png", glyph.canvas);
      write_mask_png(r_out + "_mask.png", glyph.mask);
      nlohmann::ordered_json meta;
      meta["word"] = glyph.word;
      meta["font_id"] = glyph.font_id;
      meta["bbox"] = {glyph.bbox.x, glyph.bbox.y, glyph.bbox.w, glyph.bbox.h};
      write_text(r_out + ".json", meta.dump(2) + "\n");
      return 0;
    }

    if (*compose) {
      const RgbImage background = read_png_rgb(c_bg);
      const auto labels = read_quad_labels(c_quads);
      const std::string bg_id = fs::path(c_bg).stem().string();
      const QuadLabel* quad = nullptr;
      for (const auto& l : labels) {
        if (l.background_id == bg_id) quad = &l;
      }
      if (!quad && labels.size() == 1) quad = &labels.front();
      if (!quad) throw Error(ErrorCode::SchemaViolation, "no quad for background '" + bg_id + "'");
      const FontAsset font = load_font(c_font);
      const GlyphRender glyph = render_word(c_word, font, config.render);
      SceneSpec spec;
      spec.quad = *quad;
      spec.word = c_word;
      spec.color = c_color.empty() ? sample_color(g.seed) : parse_color(c_color);
      spec.margin = config.margin;
      spec.prompt = c_prompt;
      spec.phrase_seed = g.seed;
      const SceneRender scene = compose_scene(background, glyph, spec);
      write_scene(c_out + ".png", c_out + "_mask.png", c_out + ".json", scene, spec,
                  font.font_id());
      return 0;
    }

    if (*build) {
      BuildOptions opt;
      opt.fonts = collect_fonts(b_fonts);
      opt.dictionary = WordDictionary::load(b_words);
      if (!b_eval_words.empty()) check_disjoint(opt.dictionary, WordDictionary::load(b_eval_words));
      if (!b_split.empty()) opt.split = FontSplit::load(b_split);
      if (!b_bg_dir.empty() || !b_quads.empty()) {
        if (b_bg_dir.empty() || b_quads.empty()) {
          throw Error(ErrorCode::InvalidArgument, "--backgrounds and --quads go together");
        }
        SceneSource src;
        src.background_dir = b_bg_dir;
        src.quads = read_quad_labels(b_quads);
        if (!b_prompts.empty()) src.prompts = read_prompt_map(b_prompts);
        opt.scenes = std::move(src);
      }
      opt.words_per_font = config.words_per_font;
      opt.scenes_per_font = config.scenes_per_font;
      opt.render = config.render;
      opt.margin = config.margin;
      opt.pairing = b_pairing.empty() ? config.pairing : parse_pairing_mode(b_pairing);
      opt.seed = g.seed;
      opt.jobs = g.jobs;
      const BuildReport r = build_dataset(opt, b_out);
      std::printf("fonts %zu, text-only images %zu, scene images %zu, pairs %zu + %zu\n",
                  r.fonts_built, r.text_only_images, r.scene_images, r.text_only_pairs,
                  r.scene_pairs);
      for (const auto& [font, why] : r.skipped) {
        std::fprintf(stderr, "skipped %s: %s\n", font.c_str(), why.c_str());
      }
      return 0;
    }

    if (*expand) {
      const auto templates = read_templates(e_templates);
      const WordDictionary dict = WordDictionary::load(e_words);
      std::vector<std::string> ids;
      for (const auto& p : collect_fonts(e_fonts)) ids.push_back(p.stem().string());
      if (!e_split.empty()) {
        const FontSplit split = FontSplit::load(e_split);
        const std::set<std::string> eval(split.eval.begin(), split.eval.end());
        std::erase_if(ids, [&](const std::string& id) { return !eval.count(id); });
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      const auto samples = expand_prompts(templates, ids, dict, e_per_font, g.seed);
      write_eval_manifest(e_out, samples);
      std::printf("%zu samples over %zu fonts\n", samples.size(), ids.size());
      return 0;
    }

    if (*evaluate) {
      EvalInputs in;
      in.manifest = v_manifest;
      if (!v_masks.empty()) in.masks_dir = fs::path(v_masks);
      std::vector<fs::path> dirs(v_font_dirs.begin(), v_font_dirs.end());
      in.fonts = FontRegistry::scan(dirs);
      if (!v_transcripts.empty()) in.transcripts = fs::path(v_transcripts);
      if (!v_clip.empty()) in.clip_embeddings = fs::path(v_clip);
      if (!v_siglip.empty()) in.siglip_embeddings = fs::path(v_siglip);
      if (!v_lpips.empty()) in.lpips = fs::path(v_lpips);
      const EvalSummary s = evaluate_run(in, config, g.jobs, v_out);
      std::printf("%zu evaluated, %zu flagged\n", s.n, s.flagged.size());
      for (const auto& f : s.flagged) {
        std::fprintf(stderr, "flagged %s: %s\n", f.sample_id.c_str(), f.reason.c_str());
      }
      return s.flagged.empty() ? 0 : 2;
    }

    if (*filter) {
      const auto records = read_records(f_records);
      const auto [kept, rejected] = filter_samples(records, config.filter);
      write_records(f_kept, kept);
      if (!f_rejected.empty()) write_records(f_rejected, rejected);
      std::printf("kept %zu, rejected %zu\n", kept.size(), rejected.size());
      return 0;
    }

    if (*rep) {
      std::vector<std::pair<std::string, EvalSummary>> rows;
      for (const auto& arg : p_summaries) {
        const auto eq = arg.find('=');
        const std::string label = eq == std::string::npos ? "" : arg.substr(0, eq);
        const std::string path = eq == std::string::npos ? arg : arg.substr(eq + 1);
        rows.emplace_back(label, summary_from_json(slurp(path)));
      }
      const std::string table = report(rows, parse_report_format(p_format));
      if (p_out.empty()) {
        std::cout << table;
      } else {
        write_text(p_out, table);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
