#include <chartex/error.hpp>
#include <chartex/image.hpp>

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace chartex {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const RasterImage& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) raise(errc::io_error, "cannot open for writing: " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    raise(errc::io_error, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(errc::io_error, "libpng write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = const_cast<png_bytep>(&img.pixels[std::size_t(y) * img.width * 3]);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RasterImage read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) raise(errc::io_error, "cannot open for reading: " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(errc::io_error, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(errc::io_error, "libpng read failed: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize everything to 8-bit RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  RasterImage img(static_cast<int>(png_get_image_width(png, info)),
                  static_cast<int>(png_get_image_height(png, info)));
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = &img.pixels[std::size_t(y) * img.width * 3];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) raise(errc::io_error, "cannot open for writing: " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    raise(errc::io_error, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(errc::io_error, "libpng write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<std::uint8_t> row(mask.width);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

BinaryMask read_mask_png(const std::string& path) {
  const RasterImage img = read_png(path);
  BinaryMask mask(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const Rgb c = img.get(x, y);
      mask.set(x, y, c[0] != 0 || c[1] != 0 || c[2] != 0);
    }
  return mask;
}

}  // namespace chartex
