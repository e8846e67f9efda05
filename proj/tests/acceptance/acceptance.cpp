// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force_alignment.hpp"
#include "dp_levenshtein.hpp"
#include "eval_fixture.hpp"
#include "fontsynth/config.hpp"
#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/eval_harness.hpp"
#include "fontsynth/glyph_metrics.hpp"
#include "fontsynth/png_io.hpp"
#include "fontsynth/rng.hpp"
#include "fontsynth/scene_compose.hpp"
#include "fontsynth/text_metrics.hpp"
#include "morphology.hpp"
#include "reference_ms_ssim.hpp"
#include "test_fonts.hpp"
#include "test_util.hpp"

using namespace fontsynth;
namespace fs = std::filesystem;

namespace {

constexpr double kAlignTol = 1e-9;
constexpr double kAlignBudgetSeconds = 60.0;
constexpr double kIdentityMsSsimTol = 1e-6;
constexpr double kIdentityExactTol = 1e-12;
constexpr double kAspectTol = 0.01;
constexpr double kOrderingRate = 0.90;
constexpr double kMsSsimRefTol = 1e-4;
constexpr double kDeskBuildBudgetSeconds = 30.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

WordDictionary eval_words() {
  return WordDictionary::load(fs::path(FONTSYNTH_DATA_DIR) / "words_eval.txt");
}
WordDictionary train_words() {
  return WordDictionary::load(fs::path(FONTSYNTH_DATA_DIR) / "words_train.txt");
}

Outcome alignment_oracle() {
  std::mt19937_64 rng(2024);
  SearchConfig exhaustive;
  exhaustive.coarse_stride = 1;
  double worst = 0, align_seconds = 0;
  int default_agree = 0;
  constexpr int kPairs = 200;
  for (int i = 0; i < kPairs; ++i) {
    auto dim = [&] { return 8 + static_cast<int>(rng() % 57); };
    const int gw = dim(), gh = dim(), tw = dim(), th = dim();
    const Mask gen = oracle::random_blobs(gw, gh, rng);
    const Mask gt = oracle::random_blobs(tw, th, rng);
    const auto t0 = Clock::now();
    const AlignmentResult got = align_max_iou(gen, gt, exhaustive);
    align_seconds += seconds_since(t0);
    const auto want = oracle::brute_force_align(gen, gt, exhaustive.scale_min, exhaustive.scale_max,
                                                exhaustive.scale_steps);
    worst = std::max(worst, std::abs(got.iou - want.iou));
    default_agree += std::abs(align_max_iou(gen, gt).iou - want.iou) <= kAlignTol;
  }
  return {worst <= kAlignTol && align_seconds < kAlignBudgetSeconds,
          fmt("%d pairs, max |IoU - oracle| = %.3g (tol %.0e), search time %.2f s (budget %.0f s); "
              "coarse stride-4 default matches on %d/%d",
              kPairs, worst, kAlignTol, align_seconds, kAlignBudgetSeconds, default_agree, kPairs)};
}

Outcome identity_suite() {
  const auto dir = testing::scratch_dir("accept_identity");
  const auto& fonts = testing::latin_fonts();
  const auto words = sample_words(eval_words(), "identity", 100, 1);
  const auto fx = testing::make_identity_fixture(dir, fonts, words);
  EvalInputs in;
  in.manifest = fx.manifest;
  for (const auto& f : fonts) in.fonts.add(f.font_id(), f.source_path());
  in.transcripts = fx.transcripts;
  const EvalOutcome out = evaluate_samples(in, Config{}, 0);
  double worst_iou = 0, worst_hog = 0, worst_ssim = 0;
  for (const auto& r : out.records) {
    worst_iou = std::max(worst_iou, std::abs(r.font_sim.max_iou - 1.0));
    worst_hog = std::max(worst_hog, std::abs(r.font_sim.hog_sim - 1.0));
    worst_ssim = std::max(worst_ssim, std::abs(r.font_sim.ms_ssim - 1.0));
  }
  const bool pass = out.records.size() == 100 && out.summary.flagged.empty() &&
                    worst_iou == 0.0 && worst_hog <= kIdentityExactTol &&
                    worst_ssim <= kIdentityMsSsimTol && out.summary.word_acc == 1.0;
  return {pass, fmt("%zu words over %zu fonts, max deviation iou %.3g, hog %.3g, ms-ssim %.3g; "
                    "word_acc %.4f",
                    out.records.size(), fonts.size(), worst_iou, worst_hog, worst_ssim,
                    out.summary.word_acc.value_or(-1))};
}

Outcome filter_constants() {
  const bool a = quality_filter(0.60, 0.81);
  const bool b = quality_filter(0.59, 0.90);
  const bool c = quality_filter(0.70, 0.80);
  return {a && !b && !c, fmt("(0.60, 0.81) -> %s; (0.59, 0.90) -> %s; (0.70, 0.80) -> %s",
                             a ? "keep" : "reject", b ? "keep" : "reject", c ? "keep" : "reject")};
}

std::vector<FontRenders> synthetic_renders(std::size_t fonts, std::size_t per_font) {
  const auto dict = train_words();
  std::vector<FontRenders> out;
  for (std::size_t f = 0; f < fonts; ++f) {
    FontRenders r;
    r.font_id = "font" + std::to_string(f);
    for (const auto& w : sample_words(dict, r.font_id, per_font, 0)) {
      r.text_only.push_back({"text_only/" + r.font_id + "/" + w + ".png", w});
    }
    out.push_back(std::move(r));
  }
  return out;
}

Outcome dataset_counts() {
  // Paper scale, pairing logic over synthetic render lists.
  const auto renders = synthetic_renders(1500, 10);
  std::size_t images = 0;
  for (const auto& r : renders) images += r.text_only.size();
  const auto pairs = build_pairs(renders, Stage::text_only, PairingMode::different, 0);
  std::size_t same = 0;
  for (const auto& p : pairs) same += p.ref_word == p.target_word;

  std::vector<PromptTemplate> templates;
  for (int level = 0; level < 3; ++level) {
    for (int i = 0; i < 300; ++i) {
      templates.push_back({"Scene " + std::to_string(level) + "." + std::to_string(i) + " with '<*>'",
                           static_cast<Complexity>(level)});
    }
  }
  std::vector<std::string> eval_fonts;
  for (int i = 0; i < 300; ++i) eval_fonts.push_back("eval" + std::to_string(i));
  const auto samples = expand_prompts(templates, eval_fonts, eval_words(), 10, 0);

  // Desk scale: real fonts, real renders.
  const auto& fonts = testing::latin_fonts();
  const auto dir = testing::scratch_dir("accept_counts");
  BuildOptions opt;
  for (std::size_t i = 0; i < std::min<std::size_t>(15, fonts.size()); ++i) {
    opt.fonts.push_back(fonts[i].source_path());
  }
  opt.dictionary = train_words();
  opt.seed = 7;
  opt.jobs = 0;
  const auto t0 = Clock::now();
  const BuildReport report = build_dataset(opt, dir);
  const double secs = seconds_since(t0);
  const auto desk = read_manifest(dir / "pairs_text_only.jsonl");
  std::size_t desk_same = 0;
  for (const auto& p : desk) desk_same += p.ref_word == p.target_word;

  const bool pass = images == 15000 && pairs.size() == 15000 && same == 0 && samples.size() == 9000 &&
                    opt.fonts.size() == 15 && report.text_only_images == 150 && desk.size() == 150 &&
                    desk_same == 0 && report.skipped.empty() && secs < kDeskBuildBudgetSeconds;
  return {pass, fmt("1500x10: %zu images, %zu pairs, %zu same-word; 300 fonts: %zu eval samples; "
                    "desk %zu fonts: %zu images, %zu pairs, %zu same-word in %.2f s (budget %.0f s)",
                    images, pairs.size(), same, samples.size(), opt.fonts.size(),
                    report.text_only_images, desk.size(), desk_same, secs, kDeskBuildBudgetSeconds)};
}

Outcome aspect_preservation() {
  const auto& fonts = testing::latin_fonts();
  const auto words = sample_words(train_words(), "aspect", 100, 3);
  Rng rng(stream_seed(3, "aspect"));
  const RgbImage bg(800, 600, Rgb{90, 120, 150});
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const GlyphRender g = render_word(words[i], fonts[i % fonts.size()], {128, 0.8});
    QuadLabel quad;
    for (;;) {
      const double cx = rng.uniform(250, 550), cy = rng.uniform(180, 420);
      const double hw = rng.uniform(60, 240), hh = rng.uniform(30, 170);
      quad = {"bg", {{{cx - hw, cy - hh}, {cx + hw, cy - hh}, {cx + hw, cy + hh}, {cx - hw, cy + hh}}}};
      for (auto& p : quad.corners) {
        p.x += rng.uniform(-0.3, 0.3) * hw;
        p.y += rng.uniform(-0.3, 0.3) * hh;
      }
      try {
        validate_quad(quad, bg.width(), bg.height());
        break;
      } catch (const Error&) {
      }
    }
    const SceneRender scene =
        compose_scene(bg, g, {quad, g.word, sample_color(i), rng.uniform(0.0, 0.2)});
    const double src = static_cast<double>(g.bbox.w) / g.bbox.h;
    const double placed = scene.placed_bbox_local.width() / scene.placed_bbox_local.height();
    worst = std::max(worst, std::abs(placed / src - 1.0));
  }
  return {worst <= kAspectTol,
          fmt("100 quads, max relative aspect error %.3g (tol %.2f)", worst, kAspectTol)};
}

Outcome metric_ordering() {
  const auto& fonts = testing::latin_fonts();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Rng rng(stream_seed(11, "ordering"));
  while (pairs.size() < 20) {
    const auto a = rng.below(fonts.size()), b = rng.below(fonts.size());
    if (testing::family_of(fonts[a].font_id()) == testing::family_of(fonts[b].font_id())) continue;
    pairs.emplace_back(a, b);
  }
  const auto words = sample_words(eval_words(), "ordering", 20, 11);
  int wins = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const FontAsset& a = fonts[pairs[i].first];
    const FontAsset& b = fonts[pairs[i].second];
    const Mask gt = render_word(words[i], a, {512, 0.8}).mask;
    const auto same = font_similarity({render_word(words[i], a, {384, 0.7}).mask}, {gt});
    const auto cross = font_similarity({render_word(words[i], b, {384, 0.7}).mask}, {gt});
    wins += same.max_iou > cross.max_iou && same.hog_sim > cross.hog_sim;
  }
  const double rate = wins / 20.0;
  return {rate >= kOrderingRate,
          fmt("same-font beats cross-font on both Max-IoU and HOG in %d/20 pairs (need %.0f%%)", wins,
              100 * kOrderingRate)};
}

Outcome text_metrics() {
  std::mt19937_64 rng(77);
  const std::string alphabet = "abcdefgXYZ '";
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string a, b;
    for (auto n = rng() % 13; n > 0; --n) a += alphabet[rng() % alphabet.size()];
    for (auto n = rng() % 13; n > 0; --n) b += alphabet[rng() % alphabet.size()];
    mismatches += levenshtein(a, b) != oracle::dp_levenshtein(a, b);
  }
  const double case_agnostic = ned({"ABC", "abc"});
  return {mismatches == 0 && case_agnostic == 1.0,
          fmt("1000 random pairs, %d mismatches against the DP table; ned(\"ABC\", \"abc\") = %.1f",
              mismatches, case_agnostic)};
}

Outcome ms_ssim_reference() {
  const auto& fonts = testing::latin_fonts();
  const auto words = sample_words(eval_words(), "ms-ssim", 20, 5);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const Mask gt = render_word(words[i], fonts[i % fonts.size()]).mask;
    const Mask gen = render_word(words[i], fonts[(i * 7 + 3) % fonts.size()], {384, 0.7}).mask;
    const AlignedPair pair = render_aligned_pair(gen, gt, align_max_iou(gen, gt), 256);
    worst = std::max(worst, std::abs(ms_ssim(pair.gen, pair.gt) -
                                     oracle::reference_ms_ssim(pair.gen, pair.gt)));
  }
  return {worst <= kMsSsimRefTol,
          fmt("20 aligned glyph pairs, max |ours - reference| = %.3g (tol %.0e)", worst, kMsSsimRefTol)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + FONTSYNTH_CLI + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Relative path -> contents for every regular file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      out[e.path().lexically_relative(dir).generic_string()] = testing::read_file(e.path());
    }
  }
  return out;
}

Outcome determinism() {
  const auto dir = testing::scratch_dir("accept_determinism");
  const auto& fonts = testing::latin_fonts();
  fs::create_directories(dir / "fonts");
  for (std::size_t i = 0; i < 4; ++i) {
    fs::copy_file(fonts[i].source_path(), dir / "fonts" / fonts[i].source_path().filename());
  }
  RgbImage wall(240, 160);
  for (int y = 0; y < 160; ++y) {
    for (int x = 0; x < 240; ++x) wall(x, y) = {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 60};
  }
  fs::create_directories(dir / "bg");
  write_png(dir / "bg" / "wall.png", wall);
  write_quad_labels(dir / "quads.json", {{"wall", {{{20, 20}, {220, 30}, {215, 140}, {25, 130}}}}});
  testing::write_file(dir / "prompts.json", R"({"wall": "An empty brick wall"})");
  testing::write_file(dir / "cfg.json", R"({"canvas_size": 256, "words_per_font": 4, "scenes_per_font": 3})");

  const std::string data = FONTSYNTH_DATA_DIR;
  const std::string q = "'";
  auto build = [&](const std::string& out, int jobs) {
    return run_cli("--seed 5 --jobs " + std::to_string(jobs) + " --config " + q + (dir / "cfg.json").string() + q +
                   " build-dataset --fonts " + q + (dir / "fonts").string() + q + " --words " + data +
                   "/words_train.txt --backgrounds " + q + (dir / "bg").string() + q + " --quads " + q +
                   (dir / "quads.json").string() + q + " --prompts " + q + (dir / "prompts.json").string() + q +
                   " --pairing mixed_1_to_3 --out " + q + (dir / out).string() + q);
  };
  const std::vector<FontAsset> subset(fonts.begin(), fonts.begin() + 4);
  const auto fx = testing::make_identity_fixture(dir / "gen", subset,
                                                 sample_words(eval_words(), "determinism", 12, 5), {256, 0.8});
  auto evaluate = [&](const std::string& out, int jobs) {
    return run_cli("--seed 5 --jobs " + std::to_string(jobs) + " --config " + q + (dir / "cfg.json").string() + q +
                   " evaluate --manifest " + q + fx.manifest.string() + q + " --font-dir " + q +
                   (dir / "fonts").string() + q + " --transcripts " + q + fx.transcripts.string() + q +
                   " --out " + q + (dir / out).string() + q);
  };
  const int rc = build("b1", 1) | build("b2", 4) | evaluate("e1", 1) | evaluate("e2", 4);
  const auto b1 = snapshot(dir / "b1"), b2 = snapshot(dir / "b2");
  const auto e1 = snapshot(dir / "e1"), e2 = snapshot(dir / "e2");
  const bool manifests = b1.count("pairs_text_only.jsonl") && b1.count("pairs_scene_text.jsonl");
  const bool records = e1.count("records.jsonl") && e1.count("summary.json");
  return {rc == 0 && manifests && records && b1 == b2 && e1 == e2,
          fmt("build-dataset: %zu files %s; evaluate: %zu files %s (1 vs 4 workers, same seed)", b1.size(),
              b1 == b2 ? "byte-identical" : "DIFFER", e1.size(), e1 == e2 ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  if (testing::latin_fonts().size() < 15) {
    std::printf("FAIL setup: need at least 15 Latin test fonts, found %zu (set FONTSYNTH_TEST_FONT_DIRS)\n",
                testing::latin_fonts().size());
    return 1;
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"alignment-oracle", alignment_oracle},
      {"identity-suite", identity_suite},
      {"filter-constants", filter_constants},
      {"dataset-counts", dataset_counts},
      {"aspect-preservation", aspect_preservation},
      {"metric-ordering", metric_ordering},
      {"text-metrics", text_metrics},
      {"ms-ssim-reference", ms_ssim_reference},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures;
}
