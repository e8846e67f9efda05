#include "fontsynth/scene_compose.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "fontsynth/png_io.hpp"
#include "fontsynth/rng.hpp"
#include "json.hpp"

namespace fontsynth {

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

constexpr double kMinQuadArea = 1.0;

}  // namespace

void validate_quad(const QuadLabel& quad) {
  const auto& c = quad.corners;
  for (const Point2& p : c) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::DegenerateQuad, "non-finite corner");
    }
  }
  // With y pointing down, TL -> TR -> BR -> BL turns right at every corner.
  for (int i = 0; i < 4; ++i) {
    if (cross(c[i], c[(i + 1) % 4], c[(i + 2) % 4]) <= 0.0) {
      throw Error(ErrorCode::DegenerateQuad,
                  "quad '" + quad.background_id +
                      "' is not strictly convex in TL, TR, BR, BL order");
    }
  }
  const double area = 0.5 * (cross(c[0], c[1], c[2]) + cross(c[0], c[2], c[3]));
  if (area < kMinQuadArea) {
    throw Error(ErrorCode::DegenerateQuad, "quad area is near zero");
  }
}

void validate_quad(const QuadLabel& quad, int width, int height) {
  validate_quad(quad);
  for (const Point2& p : quad.corners) {
    if (p.x < 0 || p.y < 0 || p.x > width || p.y > height) {
      throw Error(ErrorCode::DegenerateQuad,
                  "quad '" + quad.background_id + "' leaves the image bounds");
    }
  }
}

namespace {

QuadLabel quad_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("background_id") || !j.contains("corners")) {
    throw Error(ErrorCode::SchemaViolation,
                "QuadLabel needs background_id and corners");
  }
  if (!j["background_id"].is_string()) {
    throw Error(ErrorCode::SchemaViolation, "background_id must be a string");
  }
  const auto& corners = j["corners"];
  if (!corners.is_array() || corners.size() != 4) {
    throw Error(ErrorCode::SchemaViolation, "corners must hold 4 points");
  }
  QuadLabel quad;
  quad.background_id = j["background_id"].get<std::string>();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = corners[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::SchemaViolation, "corner must be [x, y]");
    }
    quad.corners[i] = {p[0].get<double>(), p[1].get<double>()};
  }
  validate_quad(quad);
  return quad;
}

nlohmann::ordered_json quad_to_json(const QuadLabel& quad) {
  nlohmann::ordered_json j;
  j["background_id"] = quad.background_id;
  auto corners = nlohmann::ordered_json::array();
  for (const Point2& p : quad.corners) corners.push_back({p.x, p.y});
  j["corners"] = corners;
  return j;
}

}  // namespace

std::vector<QuadLabel> read_quad_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  std::vector<QuadLabel> labels;
  if (doc.is_array()) {
    for (const auto& item : doc) labels.push_back(quad_from_json(item));
  } else {
    labels.push_back(quad_from_json(doc));
  }
  return labels;
}

void write_quad_labels(const std::filesystem::path& path,
                       const std::vector<QuadLabel>& labels) {
  auto doc = nlohmann::ordered_json::array();
  for (const QuadLabel& quad : labels) doc.push_back(quad_to_json(quad));
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

QuadPlacement fit_quad_transform(const Box& glyph_bbox, const QuadLabel& quad,
                                 double margin) {
  if (glyph_bbox.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty glyph box");
  }
  if (!(margin >= 0.0 && margin < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "margin must be in [0, 0.5)");
  }
  validate_quad(quad);
  const auto& c = quad.corners;

  QuadPlacement out;
  out.unit_to_image = unit_square_to_quad(c);
  out.rect_width = 0.5 * (distance(c[0], c[1]) + distance(c[3], c[2]));
  out.rect_height = 0.5 * (distance(c[0], c[3]) + distance(c[1], c[2]));

  const double scale = (1.0 - 2.0 * margin) *
                       std::min(out.rect_width / glyph_bbox.w,
                                out.rect_height / glyph_bbox.h);
  const double placed_w = scale * glyph_bbox.w;
  const double placed_h = scale * glyph_bbox.h;
  out.placed_local = {(out.rect_width - placed_w) / 2,
                      (out.rect_height - placed_h) / 2,
                      (out.rect_width + placed_w) / 2,
                      (out.rect_height + placed_h) / 2};

  // Glyph pixels -> unit square: centre the box, scale uniformly in the
  // rectified frame, then normalise each axis by the frame size.
  const double cx = glyph_bbox.center_x();
  const double cy = glyph_bbox.center_y();
  const double su = scale / out.rect_width;
  const double sv = scale / out.rect_height;
  const Homography placement({su, 0, 0.5 - su * cx, 0, sv, 0.5 - sv * cy, 0, 0, 1});
  out.transform = out.unit_to_image * placement;
  return out;
}

namespace {

// Ink coverage of the glyph at continuous pixel-centre coordinates.
double sample_coverage(const GrayImage& canvas, double sx, double sy) {
  const double fx0 = std::floor(sx), fy0 = std::floor(sy);
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double ax = sx - fx0, ay = sy - fy0;
  auto ink = [&](int x, int y) {
    return canvas.contains(x, y) ? (255 - canvas(x, y)) / 255.0 : 0.0;
  };
  const double top = ink(x0, y0) * (1 - ax) + (ax > 0 ? ink(x0 + 1, y0) * ax : 0.0);
  if (ay == 0) return top;
  const double bottom = ink(x0, y0 + 1) * (1 - ax) +
                        (ax > 0 ? ink(x0 + 1, y0 + 1) * ax : 0.0);
  return top * (1 - ay) + bottom * ay;
}

std::uint8_t blend(double coverage, std::uint8_t fg, std::uint8_t bg) {
  return static_cast<std::uint8_t>(
      std::clamp(std::lround(coverage * fg + (1.0 - coverage) * bg), 0L, 255L));
}

}  // namespace

WarpResult warp_composite(const RgbImage& background, const GlyphRender& glyph,
                          const Homography& transform, Rgb color) {
  if (glyph.canvas.empty()) throw Error(ErrorCode::EmptyMask, "empty glyph");
  const Homography inverse = transform.inverse();

  // Glyph support: every pixel carrying any ink, plus one pixel for the
  // bilinear footprint.
  int sx0 = glyph.canvas.width(), sy0 = glyph.canvas.height(), sx1 = -1, sy1 = -1;
  for (int y = 0; y < glyph.canvas.height(); ++y) {
    for (int x = 0; x < glyph.canvas.width(); ++x) {
      if (glyph.canvas(x, y) != 255) {
        sx0 = std::min(sx0, x);
        sx1 = std::max(sx1, x);
        sy0 = std::min(sy0, y);
        sy1 = y;
      }
    }
  }
  WarpResult out{background, Mask(background.width(), background.height())};
  if (sx1 < 0) return out;

  auto mapped_bounds = [&](double x0, double y0, double x1, double y1) {
    RectF r{1e300, 1e300, -1e300, -1e300};
    for (Point2 p : {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}}) {
      const Point2 q = transform.apply(p);
      r.x0 = std::min(r.x0, q.x);
      r.y0 = std::min(r.y0, q.y);
      r.x1 = std::max(r.x1, q.x);
      r.y1 = std::max(r.y1, q.y);
    }
    return r;
  };

  const Box& b = glyph.bbox;
  const RectF placed = mapped_bounds(b.x, b.y, b.right(), b.bottom());
  constexpr double kSlack = 1e-6;
  if (!(placed.x0 >= -kSlack && placed.y0 >= -kSlack &&
        placed.x1 <= background.width() + kSlack &&
        placed.y1 <= background.height() + kSlack)) {
    throw Error(ErrorCode::TransformOutOfBounds, "warped glyph leaves the image");
  }

  const RectF support = mapped_bounds(sx0 - 1.0, sy0 - 1.0, sx1 + 2.0, sy1 + 2.0);
  const int x_begin = std::max(0, static_cast<int>(std::floor(support.x0)));
  const int y_begin = std::max(0, static_cast<int>(std::floor(support.y0)));
  const int x_end = std::min(background.width(), static_cast<int>(std::ceil(support.x1)) + 1);
  const int y_end = std::min(background.height(), static_cast<int>(std::ceil(support.y1)) + 1);

  for (int y = y_begin; y < y_end; ++y) {
    for (int x = x_begin; x < x_end; ++x) {
      const Point2 src = inverse.apply({x + 0.5, y + 0.5});
      const double coverage = sample_coverage(glyph.canvas, src.x - 0.5, src.y - 0.5);
      if (coverage <= 0.0) continue;
      Rgb& px = out.image(x, y);
      px = {blend(coverage, color.r, px.r), blend(coverage, color.g, px.g),
            blend(coverage, color.b, px.b)};
      if (coverage >= 0.5) out.gt_mask.set(x, y);
    }
  }
  return out;
}

Rgb hsv_to_rgb(double hue, double saturation, double value) {
  const double c = value * saturation;
  const double hp = std::fmod(hue, 360.0) / 60.0;
  const double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = value - c;
  auto to8 = [m](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround((v + m) * 255.0), 0L, 255L));
  };
  return {to8(r), to8(g), to8(b)};
}

Rgb sample_color(std::uint64_t seed) {
  Rng rng(stream_seed(seed, "glyph-color"));
  const double hue = rng.uniform(0.0, 360.0);
  const double saturation = rng.uniform(0.4, 1.0);
  const double value = rng.uniform(0.2, 0.9);
  return hsv_to_rgb(hue, saturation, value);
}

std::size_t phrase_index(std::uint64_t phrase_seed) {
  Rng rng(stream_seed(phrase_seed, "visual-text-phrase"));
  return static_cast<std::size_t>(rng.below(kVisualTextPhrases.size()));
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Position of the first standalone, case-insensitive "empty".
std::size_t find_empty(const std::string& text) {
  constexpr std::string_view kWord = "empty";
  for (std::size_t i = 0; i + kWord.size() <= text.size(); ++i) {
    if (!iequals(std::string_view(text).substr(i, kWord.size()), kWord)) continue;
    const bool left = i == 0 || !is_word_char(text[i - 1]);
    const std::size_t end = i + kWord.size();
    const bool right = end == text.size() || !is_word_char(text[end]);
    if (left && right) return i;
  }
  return std::string::npos;
}

void repair_article(std::string& text, std::size_t removed_at) {
  // Article is the word ending right before removed_at (after one space).
  std::size_t end = removed_at;
  while (end > 0 && text[end - 1] == ' ') --end;
  std::size_t begin = end;
  while (begin > 0 && is_word_char(text[begin - 1])) --begin;
  const std::string_view article = std::string_view(text).substr(begin, end - begin);
  if (!iequals(article, "a") && !iequals(article, "an")) return;

  std::size_t next = removed_at;
  while (next < text.size() && text[next] == ' ') ++next;
  if (next >= text.size() || !std::isalpha(static_cast<unsigned char>(text[next]))) {
    return;
  }
  const char lead = static_cast<char>(std::tolower(static_cast<unsigned char>(text[next])));
  const bool vowel = std::string_view("aeiou").find(lead) != std::string_view::npos;
  const bool upper = std::isupper(static_cast<unsigned char>(text[begin]));
  std::string replacement = vowel ? "an" : "a";
  if (upper) replacement[0] = 'A';
  text.replace(begin, end - begin, replacement);
}

}  // namespace

std::string augment_prompt(std::string_view original_prompt, std::string_view word,
                           std::uint64_t phrase_seed) {
  if (original_prompt.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty prompt");
  }
  std::string text(original_prompt);
  const bool capitalised = std::isupper(static_cast<unsigned char>(text.front()));

  const std::size_t at = find_empty(text);
  if (at != std::string::npos) {
    std::size_t begin = at;
    std::size_t end = at + 5;
    if (end < text.size() && text[end] == ' ') {
      ++end;
    } else if (begin > 0 && text[begin - 1] == ' ') {
      --begin;
    }
    text.erase(begin, end - begin);
    repair_article(text, begin);
    if (capitalised && !text.empty()) {
      text.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(text.front())));
    }
  }

  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  if (!text.empty() && text.back() == '.') text.pop_back();

  std::string phrase(kVisualTextPhrases[phrase_index(phrase_seed)]);
  phrase.replace(phrase.find("<w>"), 3, word);
  return text + phrase;
}

SceneRender compose_scene(const RgbImage& background, const GlyphRender& glyph,
                          const SceneSpec& spec) {
  validate_quad(spec.quad, background.width(), background.height());
  SceneRender out;
  out.placement = fit_quad_transform(glyph.bbox, spec.quad, spec.margin);
  WarpResult warped =
      warp_composite(background, glyph, out.placement.transform, spec.color);
  out.image = std::move(warped.image);
  out.gt_mask = std::move(warped.gt_mask);
  out.placed_bbox_local = out.placement.placed_local;
  if (!spec.prompt.empty()) {
    out.prompt = augment_prompt(spec.prompt, spec.word, spec.phrase_seed);
  }
  return out;
}

void write_scene(const std::filesystem::path& image_path,
                 const std::filesystem::path& mask_path,
                 const std::filesystem::path& meta_path, const SceneRender& scene,
                 const SceneSpec& spec, std::string_view font_id) {
  write_png(image_path, scene.image);
  write_mask_png(mask_path, scene.gt_mask);
  nlohmann::ordered_json meta;
  meta["word"] = spec.word;
  meta["font_id"] = font_id;
  meta["color"] = {spec.color.r, spec.color.g, spec.color.b};
  meta["prompt"] = scene.prompt;
  auto corners = nlohmann::ordered_json::array();
  for (const Point2& p : spec.quad.corners) corners.push_back({p.x, p.y});
  meta["corners"] = corners;
  meta["background_id"] = spec.quad.background_id;
  std::ofstream out(meta_path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + meta_path.string());
  out << meta.dump(2) << '\n';
}

}  // namespace fontsynth
