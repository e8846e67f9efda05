#include "fontsynth/png_io.hpp"

#include <png.h>

#include <cstring>
#include <string>

namespace fontsynth {
namespace {

class PngReader {
 public:
  explicit PngReader(const std::filesystem::path& path) : path_(path) {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image_, path.c_str())) {
      fail();
    }
  }
  ~PngReader() { png_image_free(&image_); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  int width() const { return static_cast<int>(image_.width); }
  int height() const { return static_cast<int>(image_.height); }

  void finish(png_uint_32 format, void* buffer) {
    image_.format = format;
    if (!png_image_finish_read(&image_, nullptr, buffer, 0, nullptr)) fail();
  }

 private:
  [[noreturn]] void fail() {
    throw Error(ErrorCode::IoError,
                "cannot read PNG " + path_.string() + ": " + image_.message);
  }

  std::filesystem::path path_;
  png_image image_;
};

void write_raw(const std::filesystem::path& path, int width, int height,
               png_uint_32 format, const void* buffer) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer, 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError,
                "cannot write PNG " + path.string() + ": " + message);
  }
}

}  // namespace

GrayImage read_png_gray(const std::filesystem::path& path) {
  PngReader reader(path);
  GrayImage out(reader.width(), reader.height());
  reader.finish(PNG_FORMAT_GRAY, out.pixels().data());
  return out;
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  PngReader reader(path);
  RgbImage out(reader.width(), reader.height());
  static_assert(sizeof(Rgb) == 3);
  reader.finish(PNG_FORMAT_RGB, out.pixels().data());
  return out;
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  write_raw(path, image.width(), image.height(), PNG_FORMAT_GRAY,
            image.pixels().data());
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_raw(path, image.width(), image.height(), PNG_FORMAT_RGB,
            image.pixels().data());
}

}  // namespace fontsynth
