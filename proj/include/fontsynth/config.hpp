#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/glyph_metrics.hpp"
#include "fontsynth/glyph_render.hpp"

namespace fontsynth {

/// Run configuration shared by the CLI subcommands. Every key is optional:
///   {"canvas_size": 512, "fill_ratio": 0.8, "margin": 0.05,
///    "compare_size": 256, "words_per_font": 10, "scenes_per_font": 10,
///    "pairing": "different",
///    "search": {"scale_min", "scale_max", "scale_steps", "coarse_stride",
///               "refine_radius"},
///    "filter": {"max_iou": 0.59, "hog_sim": 0.80}}
struct Config {
  RenderOptions render;
  double margin = 0.05;
  int compare_size = 256;
  std::size_t words_per_font = 10;
  std::size_t scenes_per_font = 10;
  PairingMode pairing = PairingMode::different;
  SearchConfig search;
  FilterThresholds filter;

  /// Throws SchemaViolation on unknown keys, wrong types or out-of-range
  /// values.
  static Config parse(const std::string& json_text);
  static Config load(const std::filesystem::path& path);
  void validate() const;
  std::string dump() const;
};

}  // namespace fontsynth
