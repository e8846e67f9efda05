#include <doctest.h>

#include <json.hpp>
#include <map>
#include <set>

#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/png_io.hpp"
#include "test_fonts.hpp"
#include "test_util.hpp"

using namespace fontsynth;
using fontsynth::testing::error_code_of;

namespace {

// Distinct 4-7 letter words: "aaaa", "aaab", ...
WordDictionary synthetic_dictionary(std::size_t n, char first = 'a') {
  WordDictionary d;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w(5, first);
    std::size_t v = i;
    for (int k = 4; k >= 1; --k, v /= 26) w[k] = static_cast<char>('a' + v % 26);
    d.words.push_back(w);
  }
  return d;
}

std::vector<FontRenders> fake_renders(std::size_t fonts, std::size_t words, bool scenes = false) {
  std::vector<FontRenders> out;
  for (std::size_t f = 0; f < fonts; ++f) {
    FontRenders r;
    r.font_id = "font" + std::to_string(f);
    for (std::size_t w = 0; w < words; ++w) {
      const std::string word = "word" + std::string(1, static_cast<char>('a' + w % 26)) +
                               std::to_string(w / 26);
      r.text_only.push_back({"text_only/" + r.font_id + "/" + word + ".png", word});
      if (scenes) r.scene_text.push_back({"scene_text/" + r.font_id + "/" + word + ".png", word});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t same_word_pairs(const std::vector<DatasetPair>& pairs) {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const DatasetPair& p) {
    return p.ref_word == p.target_word;
  }));
}

}  // namespace

TEST_CASE("word dictionary validation") {
  CHECK_NOTHROW(synthetic_dictionary(100).validate());
  for (const char* bad : {"abc", "abcdefgh", "ab1d", "caf\xc3\xa9"}) {
    WordDictionary d{{"good", bad}};
    CAPTURE(bad);
    CHECK(error_code_of([&] { d.validate(); }) == ErrorCode::SchemaViolation);
  }
  WordDictionary dup{{"word", "word"}};
  CHECK(error_code_of([&] { dup.validate(); }) == ErrorCode::SchemaViolation);

  const auto dir = testing::scratch_dir("dict");
  testing::write_file(dir / "w.txt", "  alpha\n\nbravo \ncharlie\n");
  CHECK(WordDictionary::load(dir / "w.txt").words == std::vector<std::string>{"alpha", "bravo", "charlie"});
}

TEST_CASE("shipped word lists are valid and disjoint") {
  const auto train = WordDictionary::load(std::filesystem::path(FONTSYNTH_DATA_DIR) / "words_train.txt");
  const auto eval = WordDictionary::load(std::filesystem::path(FONTSYNTH_DATA_DIR) / "words_eval.txt");
  CHECK(train.words.size() == 1000);
  CHECK(eval.words.size() == 1000);
  CHECK_NOTHROW(check_disjoint(train, eval));
  const WordDictionary overlap{{"close", "quake"}};
  CHECK(error_code_of([&] { check_disjoint(overlap, eval); }) == ErrorCode::SplitOverlap);
}

TEST_CASE("sample_words") {
  const auto dict = synthetic_dictionary(1000);
  const auto ten = sample_words(dict, "FontA", 10, 7);
  CHECK(ten.size() == 10);
  CHECK(std::set<std::string>(ten.begin(), ten.end()).size() == 10);
  CHECK(sample_words(dict, "FontA", 10, 7) == ten);
  CHECK(sample_words(dict, "FontB", 10, 7) != ten);
  CHECK(sample_words(dict, "FontA", 10, 8) != ten);

  const auto all = sample_words(dict, "FontA", 1000, 7);
  std::vector<std::string> sorted = all, expect = dict.words;
  std::sort(sorted.begin(), sorted.end());
  std::sort(expect.begin(), expect.end());
  CHECK(sorted == expect);
  // Smaller requests are prefixes of the same permutation.
  CHECK(std::equal(ten.begin(), ten.end(), all.begin()));

  CHECK(error_code_of([&] { sample_words(dict, "FontA", 1001, 7); }) ==
        ErrorCode::DictionaryTooSmall);
}

TEST_CASE("build_pairs: different mode at paper scale") {
  const auto renders = fake_renders(1500, 10);
  const auto pairs = build_pairs(renders, Stage::text_only, PairingMode::different, 0);
  CHECK(pairs.size() == 15000);
  CHECK(same_word_pairs(pairs) == 0);
  for (const auto& p : pairs) {
    REQUIRE(p.reference_path.find("/" + p.font_id + "/") != std::string::npos);
    REQUIRE(p.target_path.find("/" + p.font_id + "/") != std::string::npos);
    REQUIRE(p.stage == Stage::text_only);
  }
}

TEST_CASE("build_pairs: same and mixed modes") {
  const auto renders = fake_renders(400, 10, true);
  const auto same = build_pairs(renders, Stage::scene_text, PairingMode::same, 1);
  CHECK(same.size() == 4000);
  CHECK(same_word_pairs(same) == 4000);
  for (const auto& p : same) {
    REQUIRE(p.reference_path.rfind("text_only/", 0) == 0);
    REQUIRE(p.target_path.rfind("scene_text/", 0) == 0);
  }

  const auto mixed = build_pairs(renders, Stage::text_only, PairingMode::mixed_1_to_3, 1);
  CHECK(mixed.size() == 4000);
  CHECK(std::abs(static_cast<long>(same_word_pairs(mixed)) - 1000) <= 50);
  CHECK(build_pairs(renders, Stage::text_only, PairingMode::mixed_1_to_3, 1) == mixed);
}

TEST_CASE("build_pairs: a font with one word cannot pair differently") {
  const auto renders = fake_renders(1, 1);
  CHECK(error_code_of([&] { build_pairs(renders, Stage::text_only, PairingMode::different, 0); }) ==
        ErrorCode::InsufficientWordsForFont);
}

TEST_CASE("manifest round trip") {
  const auto dir = testing::scratch_dir("manifest");
  const auto pairs = build_pairs(fake_renders(1500, 10), Stage::text_only, PairingMode::different, 3);
  CHECK(write_manifest(dir / "m.jsonl", pairs) == 15000);
  CHECK(read_manifest(dir / "m.jsonl") == pairs);

  CHECK(write_manifest(dir / "empty.jsonl", std::vector<DatasetPair>{}) == 0);
  const std::string empty = testing::read_file(dir / "empty.jsonl");
  CHECK(empty.front() == '#');
  CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
  CHECK(read_manifest(dir / "empty.jsonl").empty());

  testing::write_file(dir / "bad.jsonl",
                      "# header\n{\"ref\":\"a\",\"tgt\":\"b\",\"ref_word\":\"x\",\"tgt_word\":\"y\",\"stage\":\"text_only\"}\n");
  CHECK(error_code_of([&] { read_manifest(dir / "bad.jsonl"); }) == ErrorCode::SchemaViolation);
  testing::write_file(dir / "stage.jsonl",
                      "# header\n{\"ref\":\"a\",\"tgt\":\"b\",\"font\":\"f\",\"ref_word\":\"x\",\"tgt_word\":\"y\",\"stage\":\"video\"}\n");
  CHECK(error_code_of([&] { read_manifest(dir / "stage.jsonl"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("enum names") {
  CHECK(parse_stage(to_string(Stage::scene_text)) == Stage::scene_text);
  CHECK(parse_pairing_mode(to_string(PairingMode::mixed_1_to_3)) == PairingMode::mixed_1_to_3);
  CHECK(parse_pairing_mode("mixed") == PairingMode::mixed_1_to_3);
  CHECK(parse_complexity("moderate") == Complexity::moderate);
  CHECK(error_code_of([] { parse_pairing_mode("sometimes"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("prompt templates") {
  const PromptTemplate t{"A chalkboard with the letters '<*>' in white.", Complexity::simple};
  CHECK(t.fill("quake") == "A chalkboard with the letters 'quake' in white.");
  CHECK(error_code_of([] { PromptTemplate{"No placeholder"}.validate(); }) ==
        ErrorCode::MalformedTemplate);
  CHECK(error_code_of([] { PromptTemplate{"<*> and <*>"}.validate(); }) ==
        ErrorCode::MalformedTemplate);

  const auto dir = testing::scratch_dir("templates");
  testing::write_file(dir / "t.jsonl",
                      "{\"text\": \"A sign reading '<*>'\", \"complexity\": \"simple\"}\n"
                      "{\"text\": \"A neon '<*>' over a rainy street\", \"complexity\": \"complex\"}\n");
  const auto templates = read_templates(dir / "t.jsonl");
  REQUIRE(templates.size() == 2);
  CHECK(templates[1].complexity == Complexity::complex);
  testing::write_file(dir / "bad.jsonl", "{\"text\": \"nothing to fill\", \"complexity\": \"simple\"}\n");
  CHECK(error_code_of([&] { read_templates(dir / "bad.jsonl"); }) == ErrorCode::MalformedTemplate);
}

TEST_CASE("expand_prompts at evaluation scale") {
  std::vector<PromptTemplate> templates;
  for (int i = 0; i < 30; ++i) {
    templates.push_back({"Template " + std::to_string(i) + " with '<*>'",
                         static_cast<Complexity>(i % 3)});
  }
  std::vector<std::string> fonts;
  for (int i = 0; i < 300; ++i) fonts.push_back("eval_font_" + std::to_string(i));
  const auto dict = synthetic_dictionary(1000, 'e');
  const auto samples = expand_prompts(templates, fonts, dict, 10, 5);
  CHECK(samples.size() == 9000);
  std::map<std::string, std::array<int, 3>> per_level;
  std::set<std::string> ids;
  for (const auto& s : samples) {
    ids.insert(s.sample_id);
    REQUIRE(s.prompt.find("'" + s.word + "'") != std::string::npos);
    REQUIRE(s.gen_mask == "masks/" + s.sample_id + ".png");
    per_level[s.font_id][static_cast<int>(*s.complexity)]++;
  }
  for (const auto& [f, counts] : per_level) REQUIRE(counts == std::array<int, 3>{10, 10, 10});
  // Words are distinct within a font.
  std::set<std::string> first_font_words;
  for (std::size_t i = 0; i < 30; ++i) first_font_words.insert(samples[i].word);
  CHECK(first_font_words.size() == 30);
  CHECK(ids.size() == 9000);
  CHECK(samples.front().sample_id == "eval_font_0_000");
  CHECK(expand_prompts(templates, fonts, dict, 10, 5) == samples);

  const auto dir = testing::scratch_dir("eval_manifest");
  CHECK(write_eval_manifest(dir / "e.jsonl", samples) == 9000);
  CHECK(read_eval_manifest(dir / "e.jsonl") == samples);
  const std::vector<EvalSample> dup = {samples[0], samples[0]};
  write_eval_manifest(dir / "dup.jsonl", dup);
  CHECK(error_code_of([&] { read_eval_manifest(dir / "dup.jsonl"); }) == ErrorCode::ManifestError);
}

TEST_CASE("font split") {
  const auto dir = testing::scratch_dir("split");
  testing::write_file(dir / "ok.json", R"({"train": ["A", "B"], "eval": ["C"]})");
  CHECK(FontSplit::load(dir / "ok.json").eval == std::vector<std::string>{"C"});
  testing::write_file(dir / "bad.json", R"({"train": ["A", "B"], "eval": ["B"]})");
  CHECK(error_code_of([&] { FontSplit::load(dir / "bad.json"); }) == ErrorCode::SplitOverlap);
}

TEST_CASE("build_dataset end to end with scenes") {
  const auto& fonts = testing::latin_fonts();
  REQUIRE(fonts.size() >= 3);
  const auto dir = testing::scratch_dir("build");
  RgbImage bg(200, 120, Rgb{200, 190, 170});
  std::filesystem::create_directories(dir / "bgs");
  write_png(dir / "bgs" / "board.png", bg);

  BuildOptions opt;
  for (std::size_t i = 0; i < 3; ++i) opt.fonts.push_back(fonts[i].source_path());
  opt.fonts.push_back(dir / "missing.ttf");
  opt.dictionary = WordDictionary::load(std::filesystem::path(FONTSYNTH_DATA_DIR) / "words_train.txt");
  opt.words_per_font = 4;
  opt.render = {128, 0.8};
  opt.scenes = SceneSource{dir / "bgs", {{"board", {{{20, 20}, {180, 25}, {178, 100}, {22, 95}}}}},
                           {{"board", "An empty wooden board"}}};
  opt.scenes_per_font = 3;
  opt.seed = 9;
  opt.jobs = 2;

  const BuildReport report = build_dataset(opt, dir / "out");
  CHECK(report.fonts_built == 3);
  CHECK(report.text_only_images == 12);
  CHECK(report.scene_images == 9);
  CHECK(report.text_only_pairs == 12);
  CHECK(report.scene_pairs == 9);
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].first == "missing");

  for (const auto& p : read_manifest(dir / "out" / "pairs_scene_text.jsonl")) {
    CHECK(std::filesystem::exists(dir / "out" / p.reference_path));
    CHECK(std::filesystem::exists(dir / "out" / p.target_path));
    CHECK(p.ref_word != p.target_word);
    const auto meta_path = (dir / "out" / p.target_path).replace_extension(".json");
    const auto meta = nlohmann::json::parse(testing::read_file(meta_path));
    const std::string prompt = meta.at("prompt");
    CHECK(prompt.rfind("A wooden board, ", 0) == 0);
    CHECK(prompt.find("'" + p.target_word + "'") != std::string::npos);
  }

  // Same inputs, same bytes.
  build_dataset(opt, dir / "again");
  for (const char* name : {"pairs_text_only.jsonl", "pairs_scene_text.jsonl"}) {
    CHECK(testing::read_file(dir / "out" / name) == testing::read_file(dir / "again" / name));
  }
}

TEST_CASE("build_dataset honours the font split") {
  const auto& fonts = testing::latin_fonts();
  const auto dir = testing::scratch_dir("build_split");
  BuildOptions opt;
  for (std::size_t i = 0; i < 3; ++i) opt.fonts.push_back(fonts[i].source_path());
  opt.dictionary = synthetic_dictionary(50);
  opt.words_per_font = 2;
  opt.render = {96, 0.8};
  opt.split = FontSplit{{fonts[1].font_id()}, {fonts[0].font_id()}};
  const BuildReport report = build_dataset(opt, dir);
  CHECK(report.fonts_built == 1);
  CHECK(std::filesystem::exists(dir / "text_only" / fonts[1].font_id()));
  CHECK_FALSE(std::filesystem::exists(dir / "text_only" / fonts[0].font_id()));
}
