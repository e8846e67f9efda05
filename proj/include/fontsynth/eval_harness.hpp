#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fontsynth/config.hpp"
#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/embed_scores.hpp"
#include "fontsynth/glyph_metrics.hpp"

namespace fontsynth {

/// font_id (file stem) -> font file.
class FontRegistry {
 public:
  /// Adds every .ttf/.otf/.ttc file under each directory (recursively).
  /// The first occurrence of a stem wins; directories are scanned in order
  /// and files in sorted order.
  static FontRegistry scan(std::span<const std::filesystem::path> dirs);

  void add(const std::string& font_id, const std::filesystem::path& path);
  const std::filesystem::path* find(const std::string& font_id) const;
  const std::map<std::string, std::filesystem::path>& entries() const { return paths_; }

 private:
  std::map<std::string, std::filesystem::path> paths_;
};

struct TextAccuracy {
  std::string predicted;
  bool exact_match = false;
  double ned = 0;
};

struct PromptAlignment {
  std::optional<double> clip;
  std::optional<double> siglip;
};

struct EvalRecord {
  std::string sample_id;
  std::string font_id;
  std::string word;
  std::string prompt;
  std::optional<Complexity> complexity;
  FontSimilarityReport font_sim;
  std::optional<TextAccuracy> text_acc;
  PromptAlignment prompt_align;
};

struct FlaggedSample {
  std::string sample_id;
  std::string reason;
};

struct EvalSummary {
  std::size_t n = 0;
  double mean_max_iou = 0;
  double mean_hog = 0;
  double mean_ms_ssim = 0;
  std::optional<double> mean_lpips;
  std::optional<double> word_acc;
  std::optional<double> mean_ned;
  std::optional<double> mean_clip;
  std::optional<double> mean_siglip;
  std::vector<FlaggedSample> flagged;
};

/// Means over records that carry each value; optional means are absent when
/// no record has the value.
EvalSummary summarize(std::span<const EvalRecord> records);

/// Embedding file: a JSONL header {"dim", "family", "logit_scale",
/// "logit_bias"} followed by {"sample_id", "image": [...], "text": [...]}.
struct EmbeddingTable {
  EmbeddingFamily family = EmbeddingFamily::clip;
  std::size_t dim = 0;
  double logit_scale = 1.0;
  double logit_bias = 0.0;
  std::map<std::string, EmbeddingPair> pairs;

  static EmbeddingTable load(const std::filesystem::path& path);
};

/// {"sample_id", "predicted"} per line.
std::map<std::string, std::string> read_transcripts(const std::filesystem::path& path);
/// {"sample_id", "lpips"} per line.
std::map<std::string, double> read_lpips(const std::filesystem::path& path);

struct EvalInputs {
  std::filesystem::path manifest;
  /// Relative gen_mask paths resolve against this (default: manifest dir).
  std::optional<std::filesystem::path> masks_dir;
  FontRegistry fonts;
  std::optional<std::filesystem::path> transcripts;
  std::optional<std::filesystem::path> clip_embeddings;
  std::optional<std::filesystem::path> siglip_embeddings;
  std::optional<std::filesystem::path> lpips;
};

struct EvalOutcome {
  std::vector<EvalRecord> records;  // sorted by sample_id
  EvalSummary summary;
};

/// Evaluate every manifest sample against its ground-truth render. Samples
/// that cannot be evaluated (missing mask, unknown font, ...) are flagged and
/// skipped. Throws ManifestError for an unreadable manifest.
EvalOutcome evaluate_samples(const EvalInputs& inputs, const Config& config, unsigned jobs);

/// evaluate_samples, then write records.jsonl and summary.json to out_dir.
EvalSummary evaluate_run(const EvalInputs& inputs, const Config& config, unsigned jobs,
                         const std::filesystem::path& out_dir);

std::string record_to_json(const EvalRecord& record);
EvalRecord record_from_json(std::string_view line);
void write_records(const std::filesystem::path& path, std::span<const EvalRecord> records);
/// Throws SchemaViolation.
std::vector<EvalRecord> read_records(const std::filesystem::path& path);

std::string summary_to_json(const EvalSummary& summary);
EvalSummary summary_from_json(std::string_view text);

/// Partition by quality_filter; input order is kept within each side.
std::pair<std::vector<EvalRecord>, std::vector<EvalRecord>> filter_samples(
    std::span<const EvalRecord> records, const FilterThresholds& thresholds = {});

enum class ReportFormat { json, csv, markdown };
ReportFormat parse_report_format(std::string_view name);

/// Column headers in report order.
inline constexpr std::array<std::string_view, 8> kReportColumns = {
    "Max-IoU", "HOG-sim.", "MS-SSIM", "LPIPS", "WordAcc", "NED", "CLIP score", "SigLIP score"};

/// Absent values render as "—" (null in JSON). CSV numbers use the
/// shortest round-trip representation. Rows are (label, summary); the label
/// column is omitted when every label is empty.
std::string report(std::span<const std::pair<std::string, EvalSummary>> rows, ReportFormat format);
std::string report(const EvalSummary& summary, ReportFormat format);

}  // namespace fontsynth
