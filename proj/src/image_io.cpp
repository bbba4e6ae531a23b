#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wplus/error.hpp"
#include "wplus/image.hpp"

namespace wplus {

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
  const std::size_t n = image.side();
  std::vector<std::uint8_t> bytes(image.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(image.pixels()[i], 0.0, 1.0);
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(n);
  png.height = static_cast<png_uint_32>(n);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    std::string msg = "cannot write PNG '" + path.string() + "': " + png.message;
    png_image_free(&png);
    fail(ErrorKind::Io, msg);
  }
}

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str()))
    fail(ErrorKind::Io, "cannot read PNG '" + path.string() + "': " + png.message);
  png.format = PNG_FORMAT_RGB;
  if (png.width != png.height) {
    png_image_free(&png);
    fail(ErrorKind::ShapeMismatch, "image '" + path.string() + "' is not square (" +
                                       std::to_string(png.width) + "x" +
                                       std::to_string(png.height) + ")");
  }
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
    std::string msg = "cannot decode PNG '" + path.string() + "': " + png.message;
    png_image_free(&png);
    fail(ErrorKind::Io, msg);
  }
  ImageBuffer image(png.width);
  for (std::size_t i = 0; i < bytes.size(); ++i) image.pixels()[i] = bytes[i] / 255.0;
  return image;
}

}  // namespace wplus
