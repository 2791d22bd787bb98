#pragma once

// PNG/JPEG decoding to GrayImage plus a gray PNG writer used for fixtures.
// Backed by libpng / libjpeg; color inputs go through the BT.601 luma weights.

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "emo/core.hpp"

namespace emo {

namespace codec_detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline GrayImage load_png(std::FILE* fp, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DecodeError(path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError(path);
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  color = png_get_color_type(png, info);
  const int channels = (color == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
  const size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = pixels.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage out((int)w, (int)h);
  for (png_uint_32 y = 0; y < h; ++y) {
    const png_byte* row = pixels.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      if (channels == 1)
        out.at((int)x, (int)y) = row[x];
      else
        out.at((int)x, (int)y) = luma(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
    }
  }
  return out;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

inline GrayImage load_jpeg(std::FILE* fp, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fp);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  GrayImage out((int)cinfo.output_width, (int)cinfo.output_height);
  std::vector<JSAMPLE> row(size_t(cinfo.output_width) * cinfo.output_components);
  JSAMPROW rows[1] = {row.data()};
  while (cinfo.output_scanline < cinfo.output_height) {
    int y = (int)cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (int x = 0; x < out.width; ++x)
      out.at(x, y) = luma(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

}  // namespace codec_detail

// Decodes a PNG or JPEG file (sniffed by magic bytes) to luminance.
inline GrayImage load_frame(const std::string& path) {
  codec_detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw MissingFrameFile(path);
  unsigned char magic[4] = {0, 0, 0, 0};
  size_t n = std::fread(magic, 1, 4, fp.get());
  std::rewind(fp.get());
  if (n >= 4 && magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G')
    return codec_detail::load_png(fp.get(), path);
  if (n >= 2 && magic[0] == 0xFF && magic[1] == 0xD8) return codec_detail::load_jpeg(fp.get(), path);
  throw DecodeError(path + ": not a PNG or JPEG file");
}

// 8-bit grayscale PNG writer (fixtures and debug dumps). Values clamped to [0,255].
inline void write_gray_png(const std::string& path, const GrayImage& img) {
  if (img.empty()) throw EmoError("cannot write empty image");
  codec_detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw EmoError("cannot open for write: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw EmoError("png write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float v = img.at(x, y);
      row[x] = (png_byte)std::clamp((int)std::lround(v), 0, 255);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace emo
