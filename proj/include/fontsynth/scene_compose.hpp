#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fontsynth/geometry.hpp"
#include "fontsynth/glyph_render.hpp"
#include "fontsynth/image.hpp"

namespace fontsynth {

/// Text-placement region on a background, corners ordered TL, TR, BR, BL.
struct QuadLabel {
  std::string background_id;
  std::array<Point2, 4> corners;

  friend bool operator==(const QuadLabel&, const QuadLabel&) = default;
};

/// Throws DegenerateQuad unless the corners form a strictly convex,
/// clockwise (in y-down image coordinates) quadrilateral of positive area.
void validate_quad(const QuadLabel& quad);
/// Additionally requires every corner to lie inside a width x height image.
void validate_quad(const QuadLabel& quad, int width, int height);

/// Reads either a single QuadLabel object or an array of them.
std::vector<QuadLabel> read_quad_labels(const std::filesystem::path& path);
void write_quad_labels(const std::filesystem::path& path,
                       const std::vector<QuadLabel>& labels);

/// Axis-aligned box with real coordinates.
struct RectF {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct QuadPlacement {
  /// Glyph-canvas coordinates (pixel edges at integers) to image coordinates.
  Homography transform;
  /// Unit square to quad corners.
  Homography unit_to_image;
  /// Rectified frame size: mean lengths of opposite quad edges.
  double rect_width = 0;
  double rect_height = 0;
  /// Glyph box placed in the rectified frame (same units as rect_width).
  RectF placed_local;
};

/// Fit `glyph_bbox` into the quad: uniform scale so the box fills
/// (1 - 2 * margin) of the rectified frame along its limiting axis, centred,
/// then mapped through the unit-square-to-quad homography.
QuadPlacement fit_quad_transform(const Box& glyph_bbox, const QuadLabel& quad,
                                 double margin);

struct WarpResult {
  RgbImage image;
  Mask gt_mask;
};

/// Inverse-warp the glyph coverage with bilinear sampling and composite
/// coverage * color + (1 - coverage) * background. Pixels that receive no
/// coverage are left untouched.
WarpResult warp_composite(const RgbImage& background, const GlyphRender& glyph,
                          const Homography& transform, Rgb color);

/// Random glyph colour: HSV with hue in [0, 360), saturation in [0.4, 1],
/// value in [0.2, 0.9]. Deterministic in the seed.
Rgb sample_color(std::uint64_t seed);

Rgb hsv_to_rgb(double hue, double saturation, double value);

/// The visual-text phrases appended to training prompts; "<w>" is the word.
inline constexpr std::array<std::string_view, 4> kVisualTextPhrases = {
    ", featuring the word '<w>' written on it",
    ", bearing the word '<w>' written on it",
    ", showing the word '<w>' written on it",
    ", displaying the word '<w>' written on it",
};

/// Index into kVisualTextPhrases chosen by `phrase_seed`.
std::size_t phrase_index(std::uint64_t phrase_seed);

/// Drop the first standalone "empty", repair the a/an article before it,
/// and append a visual-text phrase naming `word`.
std::string augment_prompt(std::string_view original_prompt,
                           std::string_view word, std::uint64_t phrase_seed);

struct SceneSpec {
  QuadLabel quad;
  std::string word;
  Rgb color;
  double margin = 0.05;
  std::string prompt;  // original background prompt; may be empty
  std::uint64_t phrase_seed = 0;
};

struct SceneRender {
  RgbImage image;
  Mask gt_mask;
  RectF placed_bbox_local;
  std::string prompt;
  QuadPlacement placement;
};

SceneRender compose_scene(const RgbImage& background, const GlyphRender& glyph,
                          const SceneSpec& spec);

/// RGB PNG, mask PNG, and a metadata JSON
/// {word, font_id, color, prompt, corners} next to each other.
void write_scene(const std::filesystem::path& image_path,
                 const std::filesystem::path& mask_path,
                 const std::filesystem::path& meta_path,
                 const SceneRender& scene, const SceneSpec& spec,
                 std::string_view font_id);

}  // namespace fontsynth
