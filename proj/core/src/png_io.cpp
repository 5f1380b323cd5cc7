#include "png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ovtrack/error.hpp"
#include "ovtrack/io.hpp"

namespace ovtrack {

namespace detail {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::vector<unsigned char> read_png_bytes(const std::string& path, int* width,
                                          int* height, int* channels) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw ParseError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ParseError(path + ": png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ParseError(path + ": png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(path + ": png decode failed");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int c = static_cast<int>(png_get_channels(png, info));
  if (c != 1 && c != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path + ": expected a gray or RGB image");
  }

  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * c);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    rows[static_cast<std::size_t>(y)] =
        data.data() + static_cast<std::size_t>(y) * w * c;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  *width = w;
  *height = h;
  *channels = c;
  return data;
}

void write_png_bytes(const std::string& path, int width, int height,
                     int channels, const unsigned char* data) {
  if (channels != 1 && channels != 3) {
    throw InputError(path + ": PNG export supports 1 or 3 channels");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw ParseError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ParseError(path + ": png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ParseError(path + ": png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ParseError(path + ": png encode failed");
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
        data + static_cast<std::size_t>(y) * width * channels);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace detail

LatentGrid read_png_grid(const std::string& path) {
  int w = 0, h = 0, c = 0;
  const std::vector<unsigned char> bytes =
      detail::read_png_bytes(path, &w, &h, &c);
  LatentGrid grid;
  grid.width = w;
  grid.height = h;
  grid.channels = c;
  grid.values.reserve(bytes.size());
  for (unsigned char b : bytes) {
    grid.values.push_back(static_cast<double>(b) / 127.5 - 1.0);
  }
  grid.validate();
  return grid;
}

void write_png_grid(const std::string& path, const LatentGrid& grid) {
  grid.validate();
  std::vector<unsigned char> bytes;
  bytes.reserve(grid.values.size());
  for (double v : grid.values) {
    const double scaled = (std::clamp(v, -1.0, 1.0) + 1.0) * 127.5;
    bytes.push_back(static_cast<unsigned char>(std::lround(scaled)));
  }
  detail::write_png_bytes(path, grid.width, grid.height, grid.channels,
                          bytes.data());
}

}  // namespace ovtrack
