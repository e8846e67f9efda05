#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fontsynth/config.hpp"
#include "fontsynth/dataset_builder.hpp"
#include "fontsynth/embed_scores.hpp"
#include "fontsynth/eval_harness.hpp"
#include "fontsynth/glyph_metrics.hpp"
#include "fontsynth/glyph_render.hpp"
#include "fontsynth/scene_compose.hpp"
#include "fontsynth/text_metrics.hpp"

namespace py = pybind11;
using namespace fontsynth;

namespace {

using GrayArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

void require_2d(const py::buffer_info& info) {
  if (info.ndim != 2) throw Error(ErrorCode::InvalidArgument, "expected a 2-D array");
}

py::array_t<std::uint8_t> to_numpy(const GrayImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

py::array_t<bool> to_numpy(const Mask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) *dst++ = m(x, y);
  }
  return out;
}

py::array_t<std::uint8_t> to_numpy(const RgbImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width(), 3});
  std::uint8_t* dst = out.mutable_data();
  for (const Rgb& p : img.pixels()) {
    *dst++ = p.r;
    *dst++ = p.g;
    *dst++ = p.b;
  }
  return out;
}

GrayImage gray_from(const GrayArray& a) {
  const auto info = a.request();
  require_2d(info);
  GrayImage img(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
  std::copy_n(a.data(), img.size(), img.pixels().begin());
  return img;
}

// Any array; nonzero is glyph.
Mask mask_from(const py::array& a) {
  const auto arr = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(
      a.dtype().kind() == 'b' ? a : py::array(a.attr("astype")("bool")));
  if (!arr) throw Error(ErrorCode::InvalidArgument, "mask must be array-like");
  const auto info = arr.request();
  require_2d(info);
  Mask m(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
  const std::uint8_t* src = arr.data();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) m.set(x, y, *src++ != 0);
  }
  return m;
}

FloatImage float_from(const FloatArray& a) {
  const auto info = a.request();
  require_2d(info);
  FloatImage img(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
  std::copy_n(a.data(), img.size(), img.pixels().begin());
  return img;
}

RgbImage rgb_from(const GrayArray& a) {
  const auto info = a.request();
  if (info.ndim != 3 || info.shape[2] != 3) {
    throw Error(ErrorCode::InvalidArgument, "expected an H x W x 3 array");
  }
  RgbImage img(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
  const std::uint8_t* src = a.data();
  for (Rgb& p : img.pixels()) {
    p = {src[0], src[1], src[2]};
    src += 3;
  }
  return img;
}

py::tuple box_tuple(const Box& b) { return py::make_tuple(b.x, b.y, b.w, b.h); }

py::dict alignment_dict(const AlignmentResult& a) {
  py::dict d;
  d["scale"] = a.scale;
  d["tx"] = a.tx;
  d["ty"] = a.ty;
  d["iou"] = a.iou;
  d["intersection"] = a.intersection;
  d["union"] = a.union_area;
  return d;
}

SearchConfig search_config(double scale_min, double scale_max, int scale_steps, int coarse_stride,
                           int refine_radius) {
  return {scale_min, scale_max, scale_steps, coarse_stride, refine_radius};
}

std::array<Point2, 4> corners_from(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() != 4) throw Error(ErrorCode::InvalidArgument, "need 4 corners");
  std::array<Point2, 4> c;
  for (std::size_t i = 0; i < 4; ++i) c[i] = {pts[i].first, pts[i].second};
  return c;
}

py::array_t<double> matrix(const Homography& h) {
  py::array_t<double> out({3, 3});
  std::copy(h.values().begin(), h.values().end(), out.mutable_data());
  return out;
}

py::dict summary_dict(const EvalSummary& s) {
  return py::module_::import("json").attr("loads")(summary_to_json(s));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Glyph rendering, scene synthesis and font-fidelity metrics";

  // Message is "<Code>: detail", e.g. "MissingGlyph: ...".
  py::register_exception<Error>(m, "FontsynthError", PyExc_ValueError);

  py::class_<FontAsset>(m, "FontAsset")
      .def_property_readonly("font_id", &FontAsset::font_id)
      .def_property_readonly("source_path", &FontAsset::source_path)
      .def_property_readonly("units_per_em", &FontAsset::units_per_em)
      .def("covers", [](const FontAsset& f, const std::string& ch) {
        const auto cps = decode_utf8(ch);
        return std::all_of(cps.begin(), cps.end(), [&](char32_t c) { return f.covers(c); });
      })
      .def("__repr__", [](const FontAsset& f) { return "<FontAsset " + f.font_id() + ">"; });

  m.def("load_font", &load_font, py::arg("path"), py::arg("font_id") = std::string());

  m.def(
      "render_word",
      [](const std::string& word, const FontAsset& font, int canvas_size, double fill_ratio) {
        const GlyphRender g = render_word(word, font, {canvas_size, fill_ratio});
        py::dict d;
        d["canvas"] = to_numpy(g.canvas);
        d["mask"] = to_numpy(g.mask);
        d["bbox"] = box_tuple(g.bbox);
        return d;
      },
      py::arg("word"), py::arg("font"), py::arg("canvas_size") = 512, py::arg("fill_ratio") = 0.8,
      "Black glyphs on a white square canvas: dict(canvas, mask, bbox=(x, y, w, h)).");

  m.def("tight_bbox", [](const py::array& mask) { return box_tuple(tight_bbox(mask_from(mask))); });

  m.def("iou", [](const py::array& a, const py::array& b) { return iou(mask_from(a), mask_from(b)); });

  m.def(
      "align_max_iou",
      [](const py::array& gen, const py::array& gt, double scale_min, double scale_max, int scale_steps,
         int coarse_stride, int refine_radius) {
        return alignment_dict(align_max_iou(
            mask_from(gen), mask_from(gt),
            search_config(scale_min, scale_max, scale_steps, coarse_stride, refine_radius)));
      },
      py::arg("gen"), py::arg("gt"), py::arg("scale_min") = 0.5, py::arg("scale_max") = 2.0,
      py::arg("scale_steps") = 21, py::arg("coarse_stride") = 4, py::arg("refine_radius") = 4);

  m.def(
      "hog_descriptor",
      [](const FloatArray& image, int image_size, int cell_size, int block_cells, int bins) {
        const HogConfig cfg{image_size, cell_size, block_cells, bins};
        const auto d = hog_descriptor(float_from(image), cfg);
        return py::array_t<double>(static_cast<py::ssize_t>(d.size()), d.data());
      },
      py::arg("image"), py::arg("image_size") = 128, py::arg("cell_size") = 8,
      py::arg("block_cells") = 2, py::arg("bins") = 9,
      "HOG of an intensity image (resized to image_size square).");

  m.def("hog_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
    return hog_similarity(a, b);
  });

  m.def("ms_ssim", [](const GrayArray& a, const GrayArray& b) { return ms_ssim(gray_from(a), gray_from(b)); });

  m.def(
      "font_similarity",
      [](const py::array& gen, const py::array& gt, int compare_size) {
        FontSimilarityOptions opt;
        opt.compare_size = compare_size;
        const auto r = font_similarity({mask_from(gen)}, {mask_from(gt)}, opt);
        py::dict d;
        d["max_iou"] = r.max_iou;
        d["hog_sim"] = r.hog_sim;
        d["ms_ssim"] = r.ms_ssim;
        d["alignment"] = alignment_dict(r.alignment);
        return d;
      },
      py::arg("gen"), py::arg("gt"), py::arg("compare_size") = 256);

  m.def(
      "quality_filter",
      [](double max_iou, double hog_sim, double iou_threshold, double hog_threshold) {
        return quality_filter(max_iou, hog_sim, {iou_threshold, hog_threshold});
      },
      py::arg("max_iou"), py::arg("hog_sim"), py::arg("iou_threshold") = 0.59,
      py::arg("hog_threshold") = 0.80);

  m.def("levenshtein", &levenshtein);
  m.def("ned", [](const std::string& p, const std::string& g) { return ned({p, g}); },
        py::arg("predicted"), py::arg("ground_truth"));
  m.def("word_acc", [](const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<TranscriptPair> tp;
    for (const auto& [p, g] : pairs) tp.push_back({p, g});
    return word_acc(tp);
  });

  m.def("cosine_similarity", &cosine_similarity);
  m.def("clip_score", [](const std::vector<double>& image, const std::vector<double>& text) {
    return clip_score({image, text, EmbeddingFamily::clip});
  });
  m.def(
      "siglip_score",
      [](const std::vector<double>& image, const std::vector<double>& text, double scale, double bias) {
        return siglip_score({image, text, EmbeddingFamily::siglip}, scale, bias);
      },
      py::arg("image"), py::arg("text"), py::arg("logit_scale"), py::arg("logit_bias"));

  m.def(
      "fit_quad_transform",
      [](std::tuple<int, int, int, int> bbox, const std::vector<std::pair<double, double>>& corners,
         double margin) {
        const auto [x, y, w, h] = bbox;
        const QuadPlacement p = fit_quad_transform({x, y, w, h}, {"", corners_from(corners)}, margin);
        py::dict d;
        d["transform"] = matrix(p.transform);
        d["rect_size"] = py::make_tuple(p.rect_width, p.rect_height);
        d["placed"] = py::make_tuple(p.placed_local.x0, p.placed_local.y0, p.placed_local.x1, p.placed_local.y1);
        return d;
      },
      py::arg("bbox"), py::arg("corners"), py::arg("margin") = 0.05);

  m.def(
      "compose_scene",
      [](const GrayArray& background, const std::string& word, const FontAsset& font,
         const std::vector<std::pair<double, double>>& corners, std::tuple<int, int, int> color,
         double margin, int canvas_size, const std::string& prompt, std::uint64_t phrase_seed) {
        const GlyphRender g = render_word(word, font, {canvas_size, 0.8});
        const auto [r, gr, b] = color;
        SceneSpec spec{{"", corners_from(corners)},
                       word,
                       {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(gr), static_cast<std::uint8_t>(b)},
                       margin,
                       prompt,
                       phrase_seed};
        const SceneRender s = compose_scene(rgb_from(background), g, spec);
        py::dict d;
        d["image"] = to_numpy(s.image);
        d["gt_mask"] = to_numpy(s.gt_mask);
        d["prompt"] = s.prompt;
        d["placed"] = py::make_tuple(s.placed_bbox_local.x0, s.placed_bbox_local.y0, s.placed_bbox_local.x1,
                                     s.placed_bbox_local.y1);
        return d;
      },
      py::arg("background"), py::arg("word"), py::arg("font"), py::arg("corners"),
      py::arg("color") = std::make_tuple(0, 0, 0), py::arg("margin") = 0.05, py::arg("canvas_size") = 512,
      py::arg("prompt") = std::string(), py::arg("phrase_seed") = 0);

  m.def("sample_color", [](std::uint64_t seed) {
    const Rgb c = sample_color(seed);
    return py::make_tuple(c.r, c.g, c.b);
  });
  m.def("augment_prompt", &augment_prompt, py::arg("prompt"), py::arg("word"), py::arg("phrase_seed"));

  m.def(
      "sample_words",
      [](const std::vector<std::string>& words, const std::string& font_id, std::size_t k, std::uint64_t seed) {
        WordDictionary d{words};
        d.validate();
        return sample_words(d, font_id, k, seed);
      },
      py::arg("words"), py::arg("font_id"), py::arg("k"), py::arg("seed"));

  m.def(
      "build_dataset",
      [](const std::vector<std::filesystem::path>& fonts, const std::filesystem::path& words,
         const std::filesystem::path& out, std::size_t words_per_font, const std::string& pairing,
         int canvas_size, std::uint64_t seed, unsigned jobs) {
        BuildOptions opt;
        opt.fonts = fonts;
        opt.dictionary = WordDictionary::load(words);
        opt.words_per_font = words_per_font;
        opt.pairing = parse_pairing_mode(pairing);
        opt.render.canvas_size = canvas_size;
        opt.seed = seed;
        opt.jobs = jobs;
        BuildReport r;
        {
          py::gil_scoped_release release;
          r = build_dataset(opt, out);
        }
        py::dict d;
        d["fonts_built"] = r.fonts_built;
        d["text_only_images"] = r.text_only_images;
        d["text_only_pairs"] = r.text_only_pairs;
        d["skipped"] = r.skipped;
        return d;
      },
      py::arg("fonts"), py::arg("words"), py::arg("out"), py::arg("words_per_font") = 10,
      py::arg("pairing") = "different", py::arg("canvas_size") = 512, py::arg("seed") = 0,
      py::arg("jobs") = 1);

  m.def(
      "evaluate",
      [](const std::filesystem::path& manifest, const std::vector<std::filesystem::path>& font_dirs,
         const std::filesystem::path& out, std::optional<std::filesystem::path> transcripts, unsigned jobs) {
        EvalInputs in;
        in.manifest = manifest;
        in.fonts = FontRegistry::scan(font_dirs);
        in.transcripts = std::move(transcripts);
        EvalSummary s;
        {
          py::gil_scoped_release release;
          s = evaluate_run(in, Config{}, jobs, out);
        }
        return summary_dict(s);
      },
      py::arg("manifest"), py::arg("font_dirs"), py::arg("out"), py::arg("transcripts") = py::none(),
      py::arg("jobs") = 1, "Score a run; writes records.jsonl and summary.json, returns the summary.");
}
