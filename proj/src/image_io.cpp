// SPDX-License-Identifier: Apache-2.0
#include "groundseq/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "groundseq/manifest.hpp"

namespace groundseq {

namespace {

ImageBuffer load_png(const std::string& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ValidationError(std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  ImageBuffer img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.data.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw ValidationError("png: " + msg);
  }
  return img;
}

ImageBuffer load_ppm(const std::string& bytes) {
  std::size_t pos = 2;
  const auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 20) throw ValidationError("ppm: header value too large");
    }
    if (pos == start) throw ValidationError("ppm: malformed header");
    return static_cast<int>(v);
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (maxval != 255) throw ValidationError("ppm: only maxval 255 is supported");
  ++pos;  // single whitespace before the raster
  ImageBuffer img(w, h);
  if (bytes.size() < pos + img.data.size()) throw ValidationError("ppm: truncated raster");
  std::memcpy(img.data.data(), bytes.data() + pos, img.data.size());
  return img;
}

}  // namespace

ImageBuffer load_image(const std::filesystem::path& p) {
  const std::string bytes = store::read_file(p);
  ImageBuffer img;
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
    img = load_png(bytes);
  } else if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    img = load_ppm(bytes);
  } else {
    throw ValidationError("unsupported image format: " + p.string());
  }
  img.uri = p.string();
  return img;
}

void save_png(const std::filesystem::path& p, const ImageBuffer& img) {
  require_valid(validate(img), "save_png");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr)) {
    throw std::runtime_error(std::string("png: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data.data(), 0, nullptr)) {
    throw std::runtime_error(std::string("png: ") + image.message);
  }
  out.resize(size);
  store::write_file_atomic(p, out);
}

void save_ppm(const std::filesystem::path& p, const ImageBuffer& img) {
  require_valid(validate(img), "save_ppm");
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  store::write_file_atomic(p, out);
}

}  // namespace groundseq
