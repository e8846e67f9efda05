#include "fontsynth/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fontsynth/error.hpp"

namespace fontsynth {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::SchemaViolation, "unknown config key '" + where + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

}  // namespace

Config Config::parse(const std::string& json_text) {
  Config c;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "config must be a JSON object");
    reject_unknown(j,
                   {"canvas_size", "fill_ratio", "margin", "compare_size", "words_per_font",
                    "scenes_per_font", "pairing", "search", "filter"},
                   "");
    read(j, "canvas_size", c.render.canvas_size);
    read(j, "fill_ratio", c.render.fill_ratio);
    read(j, "margin", c.margin);
    read(j, "compare_size", c.compare_size);
    read(j, "words_per_font", c.words_per_font);
    read(j, "scenes_per_font", c.scenes_per_font);
    if (j.contains("pairing")) c.pairing = parse_pairing_mode(j.at("pairing").get<std::string>());
    if (j.contains("search")) {
      const json& s = j.at("search");
      reject_unknown(s, {"scale_min", "scale_max", "scale_steps", "coarse_stride", "refine_radius"},
                     "search.");
      read(s, "scale_min", c.search.scale_min);
      read(s, "scale_max", c.search.scale_max);
      read(s, "scale_steps", c.search.scale_steps);
      read(s, "coarse_stride", c.search.coarse_stride);
      read(s, "refine_radius", c.search.refine_radius);
    }
    if (j.contains("filter")) {
      const json& f = j.at("filter");
      reject_unknown(f, {"max_iou", "hog_sim"}, "filter.");
      read(f, "max_iou", c.filter.max_iou);
      read(f, "hog_sim", c.filter.hog_sim);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, "config: " + what);
  };
  if (render.canvas_size < 8) fail("canvas_size must be at least 8");
  if (!(render.fill_ratio > 0 && render.fill_ratio <= 1)) fail("fill_ratio must be in (0, 1]");
  if (!(margin >= 0 && margin < 0.5)) fail("margin must be in [0, 0.5)");
  if (compare_size < 1) fail("compare_size must be positive");
  if (words_per_font < 1) fail("words_per_font must be positive");
  if (!(search.scale_min > 0 && search.scale_max >= search.scale_min)) fail("bad scale range");
  if (search.scale_steps < 1) fail("scale_steps must be positive");
  if (search.coarse_stride < 1 || search.refine_radius < 0) fail("bad search strides");
}

std::string Config::dump() const {
  nlohmann::ordered_json j;
  j["canvas_size"] = render.canvas_size;
  j["fill_ratio"] = render.fill_ratio;
  j["margin"] = margin;
  j["compare_size"] = compare_size;
  j["words_per_font"] = words_per_font;
  j["scenes_per_font"] = scenes_per_font;
  j["pairing"] = to_string(pairing);
  j["search"] = {{"scale_min", search.scale_min},
                 {"scale_max", search.scale_max},
                 {"scale_steps", search.scale_steps},
                 {"coarse_stride", search.coarse_stride},
                 {"refine_radius", search.refine_radius}};
  j["filter"] = {{"max_iou", filter.max_iou}, {"hog_sim", filter.hog_sim}};
  return j.dump(2);
}

}  // namespace fontsynth
