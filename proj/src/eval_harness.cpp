#include "fontsynth/eval_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fontsynth/error.hpp"
#include "fontsynth/glyph_render.hpp"
#include "fontsynth/parallel.hpp"
#include "fontsynth/png_io.hpp"
#include "fontsynth/text_metrics.hpp"

namespace fontsynth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      fn(ojson::parse(line), number);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaViolation,
                  path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
  }
}

template <typename T>
std::optional<T> optional_field(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

struct Accumulator {
  double sum = 0;
  std::size_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  void add(const std::optional<double>& v) {
    if (v) add(*v);
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

}  // namespace

FontRegistry FontRegistry::scan(std::span<const fs::path> dirs) {
  FontRegistry reg;
  for (const auto& dir : dirs) {
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (ext == ".ttf" || ext == ".otf" || ext == ".ttc") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) reg.paths_.emplace(f.stem().string(), f);
  }
  return reg;
}

void FontRegistry::add(const std::string& font_id, const fs::path& path) {
  paths_[font_id] = path;
}

const fs::path* FontRegistry::find(const std::string& font_id) const {
  const auto it = paths_.find(font_id);
  return it == paths_.end() ? nullptr : &it->second;
}

EvalSummary summarize(std::span<const EvalRecord> records) {
  Accumulator iou, hog, ssim, lpips, acc, ned_acc, clip, siglip;
  for (const auto& r : records) {
    iou.add(r.font_sim.max_iou);
    hog.add(r.font_sim.hog_sim);
    ssim.add(r.font_sim.ms_ssim);
    lpips.add(r.font_sim.lpips);
    if (r.text_acc) {
      acc.add(r.text_acc->exact_match ? 1.0 : 0.0);
      ned_acc.add(r.text_acc->ned);
    }
    clip.add(r.prompt_align.clip);
    siglip.add(r.prompt_align.siglip);
  }
  EvalSummary s;
  s.n = records.size();
  s.mean_max_iou = iou.mean().value_or(0.0);
  s.mean_hog = hog.mean().value_or(0.0);
  s.mean_ms_ssim = ssim.mean().value_or(0.0);
  s.mean_lpips = lpips.mean();
  s.word_acc = acc.mean();
  s.mean_ned = ned_acc.mean();
  s.mean_clip = clip.mean();
  s.mean_siglip = siglip.mean();
  return s;
}

EmbeddingTable EmbeddingTable::load(const fs::path& path) {
  EmbeddingTable table;
  bool header = false;
  for_each_jsonl(path, [&](const ojson& j, std::size_t line) {
    if (!header) {
      table.dim = j.at("dim").get<std::size_t>();
      table.family = parse_embedding_family(j.at("family").get<std::string>());
      table.logit_scale = optional_field<double>(j, "logit_scale").value_or(1.0);
      table.logit_bias = optional_field<double>(j, "logit_bias").value_or(0.0);
      header = true;
      return;
    }
    EmbeddingPair pair;
    pair.family = table.family;
    pair.image_vec = j.at("image").get<std::vector<double>>();
    pair.text_vec = j.at("text").get<std::vector<double>>();
    if (pair.image_vec.size() != table.dim || pair.text_vec.size() != table.dim) {
      throw Error(ErrorCode::DimensionMismatch, path.string() + " line " + std::to_string(line) +
                                                    ": expected dimension " +
                                                    std::to_string(table.dim));
    }
    table.pairs[j.at("sample_id").get<std::string>()] = std::move(pair);
  });
  if (!header) throw Error(ErrorCode::SchemaViolation, path.string() + ": missing header line");
  return table;
}

std::map<std::string, std::string> read_transcripts(const fs::path& path) {
  std::map<std::string, std::string> out;
  for_each_jsonl(path, [&](const ojson& j, std::size_t) {
    out[j.at("sample_id").get<std::string>()] = j.at("predicted").get<std::string>();
  });
  return out;
}

std::map<std::string, double> read_lpips(const fs::path& path) {
  std::map<std::string, double> out;
  for_each_jsonl(path, [&](const ojson& j, std::size_t) {
    out[j.at("sample_id").get<std::string>()] = j.at("lpips").get<double>();
  });
  return out;
}

EvalOutcome evaluate_samples(const EvalInputs& inputs, const Config& config, unsigned jobs) {
  std::vector<EvalSample> samples = read_eval_manifest(inputs.manifest);
  std::sort(samples.begin(), samples.end(),
            [](const EvalSample& a, const EvalSample& b) { return a.sample_id < b.sample_id; });
  const fs::path base = inputs.masks_dir ? *inputs.masks_dir : inputs.manifest.parent_path();

  std::map<std::string, std::string> transcripts;
  std::map<std::string, double> lpips;
  std::optional<EmbeddingTable> clip, siglip;
  if (inputs.transcripts) transcripts = read_transcripts(*inputs.transcripts);
  if (inputs.lpips) lpips = read_lpips(*inputs.lpips);
  if (inputs.clip_embeddings) clip = EmbeddingTable::load(*inputs.clip_embeddings);
  if (inputs.siglip_embeddings) siglip = EmbeddingTable::load(*inputs.siglip_embeddings);
  if ((clip && clip->family != EmbeddingFamily::clip) ||
      (siglip && siglip->family != EmbeddingFamily::siglip)) {
    throw Error(ErrorCode::FamilyMismatch, "embedding file header names the wrong family");
  }

  // Fonts load once up front; a font that fails flags its samples.
  std::map<std::string, FontAsset> fonts;
  std::map<std::string, std::string> font_errors;
  for (const auto& s : samples) {
    if (fonts.count(s.font_id) || font_errors.count(s.font_id)) continue;
    const fs::path* path = inputs.fonts.find(s.font_id);
    if (!path) {
      font_errors[s.font_id] = "UnknownFont: no font file for '" + s.font_id + "'";
      continue;
    }
    try {
      fonts.emplace(s.font_id, load_font(*path, s.font_id));
    } catch (const Error& e) {
      font_errors[s.font_id] = e.what();
    }
  }

  FontSimilarityOptions sim;
  sim.search = config.search;
  sim.compare_size = config.compare_size;

  std::vector<std::optional<EvalRecord>> results(samples.size());
  std::vector<std::string> reasons(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const EvalSample& s = samples[i];
    try {
      if (auto it = font_errors.find(s.font_id); it != font_errors.end()) {
        reasons[i] = it->second;
        return;
      }
      fs::path mask_path = s.gen_mask;
      if (mask_path.is_relative()) mask_path = base / mask_path;
      if (!fs::exists(mask_path)) {
        throw Error(ErrorCode::MissingMask, "no generated mask at " + mask_path.generic_string());
      }
      const SegmentedGlyph gen = SegmentedGlyph::from_soft_mask(read_png_gray(mask_path));
      const GlyphRender gt = render_word(s.word, fonts.at(s.font_id), config.render);

      EvalRecord r;
      r.sample_id = s.sample_id;
      r.font_id = s.font_id;
      r.word = s.word;
      r.prompt = s.prompt;
      r.complexity = s.complexity;
      r.font_sim = font_similarity(gen, SegmentedGlyph{gt.mask}, sim);
      if (auto it = lpips.find(s.sample_id); it != lpips.end()) r.font_sim.lpips = it->second;
      if (auto it = transcripts.find(s.sample_id); it != transcripts.end()) {
        const TranscriptPair pair{it->second, s.word};
        r.text_acc = TextAccuracy{it->second, exact_match(pair), ned(pair)};
      }
      if (clip) {
        if (auto it = clip->pairs.find(s.sample_id); it != clip->pairs.end()) {
          r.prompt_align.clip = clip_score(it->second);
        }
      }
      if (siglip) {
        if (auto it = siglip->pairs.find(s.sample_id); it != siglip->pairs.end()) {
          r.prompt_align.siglip = siglip_score(it->second, siglip->logit_scale, siglip->logit_bias);
        }
      }
      results[i] = std::move(r);
    } catch (const Error& e) {
      reasons[i] = e.what();
    }
  });

  EvalOutcome out;
  std::vector<FlaggedSample> flagged;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (results[i]) {
      out.records.push_back(std::move(*results[i]));
    } else {
      flagged.push_back({samples[i].sample_id, reasons[i]});
    }
  }
  out.summary = summarize(out.records);
  out.summary.flagged = std::move(flagged);
  return out;
}

EvalSummary evaluate_run(const EvalInputs& inputs, const Config& config, unsigned jobs,
                         const fs::path& out_dir) {
  EvalOutcome outcome = evaluate_samples(inputs, config, jobs);
  fs::create_directories(out_dir);
  write_records(out_dir / "records.jsonl", outcome.records);
  std::ofstream summary = open_out(out_dir / "summary.json");
  summary << summary_to_json(outcome.summary) << '\n';
  if (!summary) throw Error(ErrorCode::IoError, "failed writing summary.json");
  return outcome.summary;
}

std::string record_to_json(const EvalRecord& r) {
  ojson j;
  j["sample_id"] = r.sample_id;
  j["font"] = r.font_id;
  j["word"] = r.word;
  j["prompt"] = r.prompt;
  if (r.complexity) j["complexity"] = to_string(*r.complexity);
  ojson fsim;
  fsim["max_iou"] = r.font_sim.max_iou;
  fsim["hog_sim"] = r.font_sim.hog_sim;
  fsim["ms_ssim"] = r.font_sim.ms_ssim;
  if (r.font_sim.lpips) fsim["lpips"] = *r.font_sim.lpips;
  fsim["alignment"] = {{"scale", r.font_sim.alignment.scale},
                       {"tx", r.font_sim.alignment.tx},
                       {"ty", r.font_sim.alignment.ty}};
  j["font_sim"] = fsim;
  if (r.text_acc) {
    j["text_acc"] = {{"predicted", r.text_acc->predicted},
                     {"exact_match", r.text_acc->exact_match},
                     {"ned", r.text_acc->ned}};
  }
  ojson align = ojson::object();
  if (r.prompt_align.clip) align["clip"] = *r.prompt_align.clip;
  if (r.prompt_align.siglip) align["siglip"] = *r.prompt_align.siglip;
  j["prompt_align"] = align;
  return j.dump();
}

EvalRecord record_from_json(std::string_view line) {
  try {
    const ojson j = ojson::parse(line);
    EvalRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.font_id = j.at("font").get<std::string>();
    r.word = j.at("word").get<std::string>();
    r.prompt = j.value("prompt", std::string{});
    if (auto c = optional_field<std::string>(j, "complexity")) r.complexity = parse_complexity(*c);
    const ojson& f = j.at("font_sim");
    r.font_sim.max_iou = f.at("max_iou").get<double>();
    r.font_sim.hog_sim = f.at("hog_sim").get<double>();
    r.font_sim.ms_ssim = f.at("ms_ssim").get<double>();
    r.font_sim.lpips = optional_field<double>(f, "lpips");
    if (f.contains("alignment")) {
      const ojson& a = f.at("alignment");
      r.font_sim.alignment.scale = a.at("scale").get<double>();
      r.font_sim.alignment.tx = a.at("tx").get<int>();
      r.font_sim.alignment.ty = a.at("ty").get<int>();
    }
    r.font_sim.alignment.iou = r.font_sim.max_iou;
    if (j.contains("text_acc")) {
      const ojson& t = j.at("text_acc");
      r.text_acc = TextAccuracy{t.value("predicted", std::string{}),
                                t.at("exact_match").get<bool>(), t.at("ned").get<double>()};
    }
    if (j.contains("prompt_align")) {
      r.prompt_align.clip = optional_field<double>(j.at("prompt_align"), "clip");
      r.prompt_align.siglip = optional_field<double>(j.at("prompt_align"), "siglip");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("record: ") + e.what());
  }
}

void write_records(const fs::path& path, std::span<const EvalRecord> records) {
  std::ofstream out = open_out(path);
  for (const auto& r : records) out << record_to_json(r) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<EvalRecord> read_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_json(line));
  }
  return out;
}

std::string summary_to_json(const EvalSummary& s) {
  ojson j;
  const auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
  j["n"] = s.n;
  j["mean_max_iou"] = s.mean_max_iou;
  j["mean_hog"] = s.mean_hog;
  j["mean_ms_ssim"] = s.mean_ms_ssim;
  j["mean_lpips"] = opt(s.mean_lpips);
  j["word_acc"] = opt(s.word_acc);
  j["mean_ned"] = opt(s.mean_ned);
  j["mean_clip"] = opt(s.mean_clip);
  j["mean_siglip"] = opt(s.mean_siglip);
  auto flagged = ojson::array();
  for (const auto& f : s.flagged) flagged.push_back({{"sample_id", f.sample_id}, {"reason", f.reason}});
  j["flagged"] = flagged;
  return j.dump(2);
}

EvalSummary summary_from_json(std::string_view text) {
  try {
    const ojson j = ojson::parse(text);
    EvalSummary s;
    s.n = j.at("n").get<std::size_t>();
    s.mean_max_iou = j.at("mean_max_iou").get<double>();
    s.mean_hog = j.at("mean_hog").get<double>();
    s.mean_ms_ssim = j.at("mean_ms_ssim").get<double>();
    s.mean_lpips = optional_field<double>(j, "mean_lpips");
    s.word_acc = optional_field<double>(j, "word_acc");
    s.mean_ned = optional_field<double>(j, "mean_ned");
    s.mean_clip = optional_field<double>(j, "mean_clip");
    s.mean_siglip = optional_field<double>(j, "mean_siglip");
    if (j.contains("flagged")) {
      for (const auto& f : j.at("flagged")) {
        s.flagged.push_back({f.at("sample_id").get<std::string>(), f.value("reason", std::string{})});
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("summary: ") + e.what());
  }
}

std::pair<std::vector<EvalRecord>, std::vector<EvalRecord>> filter_samples(
    std::span<const EvalRecord> records, const FilterThresholds& thresholds) {
  std::pair<std::vector<EvalRecord>, std::vector<EvalRecord>> out;
  for (const auto& r : records) {
    (quality_filter(r.font_sim, thresholds) ? out.first : out.second).push_back(r);
  }
  return out;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(name) + "'");
}

namespace {

constexpr std::string_view kAbsent = "—";

std::array<std::optional<double>, 8> report_values(const EvalSummary& s) {
  return {s.mean_max_iou, s.mean_hog, s.mean_ms_ssim, s.mean_lpips,
          s.word_acc,     s.mean_ned, s.mean_clip,    s.mean_siglip};
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string report(std::span<const std::pair<std::string, EvalSummary>> rows, ReportFormat format) {
  const bool labelled = std::any_of(rows.begin(), rows.end(),
                                    [](const auto& r) { return !r.first.empty(); });
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json: {
      auto arr = ojson::array();
      for (const auto& [label, summary] : rows) {
        ojson row;
        if (labelled) row["label"] = label;
        row["n"] = summary.n;
        const auto values = report_values(summary);
        for (std::size_t c = 0; c < kReportColumns.size(); ++c) {
          row[std::string(kReportColumns[c])] = values[c] ? ojson(*values[c]) : ojson(nullptr);
        }
        arr.push_back(row);
      }
      out << (arr.size() == 1 ? arr[0].dump(2) : arr.dump(2)) << '\n';
      break;
    }
    case ReportFormat::csv: {
      if (labelled) out << "label,";
      for (std::size_t c = 0; c < kReportColumns.size(); ++c) {
        out << (c ? "," : "") << kReportColumns[c];
      }
      out << '\n';
      for (const auto& [label, summary] : rows) {
        if (labelled) out << csv_cell(label) << ',';
        const auto values = report_values(summary);
        for (std::size_t c = 0; c < values.size(); ++c) {
          out << (c ? "," : "") << (values[c] ? shortest(*values[c]) : std::string(kAbsent));
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::markdown: {
      out << '|';
      if (labelled) out << " Method |";
      for (const auto& h : kReportColumns) out << ' ' << h << " |";
      out << "\n|";
      if (labelled) out << "---|";
      for (std::size_t c = 0; c < kReportColumns.size(); ++c) out << "---:|";
      out << '\n';
      for (const auto& [label, summary] : rows) {
        out << '|';
        if (labelled) out << ' ' << label << " |";
        for (const auto& v : report_values(summary)) {
          out << ' ' << (v ? fixed4(*v) : std::string(kAbsent)) << " |";
        }
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

std::string report(const EvalSummary& summary, ReportFormat format) {
  const std::pair<std::string, EvalSummary> row{"", summary};
  return report(std::span(&row, 1), format);
}

}  // namespace fontsynth
