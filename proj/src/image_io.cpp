// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "raisr/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "raisr/error.hpp"

namespace raisr {
namespace {

enum class Format { Png, Pnm, Jpeg, Unknown };

Format format_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return Format::Png;
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return Format::Pnm;
  if (ext == ".jpg" || ext == ".jpeg") return Format::Jpeg;
  return Format::Unknown;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) fail_io("cannot open " + path.string());
  return f;
}

// Interleaved 8-bit samples to planes.
Raster from_interleaved(const std::vector<unsigned char>& px, int w, int h, int channels) {
  Raster r;
  for (int ch = 0; ch < channels; ++ch) {
    ImagePlane p(w, h);
    for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = px[i * channels + ch];
    r.planes.push_back(std::move(p));
  }
  return r;
}

std::vector<unsigned char> to_interleaved(const Raster& r) {
  const int channels = int(r.planes.size());
  const std::size_t n = r.planes.front().size();
  std::vector<unsigned char> px(n * channels);
  for (int ch = 0; ch < channels; ++ch)
    for (std::size_t i = 0; i < n; ++i)
      px[i * channels + ch] = static_cast<unsigned char>(std::clamp(std::round(r.planes[ch].data()[i]), 0.0, 255.0));
  return px;
}

void check_raster(const Raster& r) {
  if (r.planes.size() != 1 && r.planes.size() != 3) fail_usage("only gray and RGB images can be written");
  for (const auto& p : r.planes)
    if (!p.same_shape(r.planes.front())) fail_usage("raster planes differ in size");
  if (r.width() == 0 || r.height() == 0) fail_usage("cannot write an empty image");
}

// ---- PNG ----

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

Raster read_png(const std::filesystem::path& path) {
  File f = open_file(path, "rb");
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn, png_warning_fn);
  if (!png) fail_io("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<unsigned char> px;
  std::vector<png_bytep> rows;
  int w = 0, h = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_io("cannot decode " + path.string() + ": " + message);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_packing(png);
  png_set_strip_alpha(png);
  png_set_expand(png);
  png_read_update_info(png, info);
  w = int(png_get_image_width(png, info));
  h = int(png_get_image_height(png, info));
  channels = int(png_get_channels(png, info));
  const png_byte type = png_get_color_type(png, info);
  if (!(channels == 1 && type == PNG_COLOR_TYPE_GRAY) && !(channels == 3 && type == PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_io("unsupported PNG layout in " + path.string());
  }
  px.resize(std::size_t(w) * h * channels);
  rows.resize(h);
  for (int r = 0; r < h; ++r) rows[r] = px.data() + std::size_t(r) * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_interleaved(px, w, h, channels);
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  const std::vector<unsigned char> px = to_interleaved(raster);
  const int w = raster.width(), h = raster.height(), channels = int(raster.planes.size());
  File f = open_file(path, "wb");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn, png_warning_fn);
  if (!png) fail_io("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(h);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail_io("cannot encode " + path.string() + ": " + message);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, w, h, 8, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < h; ++r) rows[r] = const_cast<png_bytep>(px.data() + std::size_t(r) * w * channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---- PNM (binary P5/P6, maxval 255) ----

Raster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P6") fail_io(path.string() + ": only binary P5/P6 supported");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    fail_io(path.string() + ": malformed header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) fail_io(path.string() + ": unsupported dimensions or maxval");
  const int channels = magic == "P5" ? 1 : 3;
  std::vector<unsigned char> px(std::size_t(w) * h * channels);
  in.read(reinterpret_cast<char*>(px.data()), std::streamsize(px.size()));
  if (std::size_t(in.gcount()) != px.size()) fail_io(path.string() + ": truncated pixel data");
  return from_interleaved(px, w, h, channels);
}

void write_pnm(const std::filesystem::path& path, const Raster& raster) {
  const std::vector<unsigned char> px = to_interleaved(raster);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("cannot open " + path.string());
  out << (raster.is_gray() ? "P5" : "P6") << "\n" << raster.width() << " " << raster.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
  if (!out) fail_io("write failed: " + path.string());
}

// ---- JPEG ----

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Raster read_jpeg(const std::filesystem::path& path) {
  File f = open_file(path, "rb");
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  std::vector<unsigned char> px;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail_io("cannot decode " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int w = int(cinfo.output_width), h = int(cinfo.output_height), channels = cinfo.output_components;
  px.resize(std::size_t(w) * h * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = px.data() + std::size_t(cinfo.output_scanline) * w * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_interleaved(px, w, h, channels);
}

}  // namespace

void write_jpeg(const std::filesystem::path& path, const Raster& raster, int quality) {
  check_raster(raster);
  if (quality < 0 || quality > 100) fail_usage("JPEG quality must be in [0,100]");
  const std::vector<unsigned char> px = to_interleaved(raster);
  const int channels = int(raster.planes.size());
  File f = open_file(path, "wb");
  jpeg_compress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    fail_io("cannot encode " + path.string() + ": " + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = JDIMENSION(raster.width());
  cinfo.image_height = JDIMENSION(raster.height());
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(px.data() + std::size_t(cinfo.next_scanline) * raster.width() * channels);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

bool is_image_file(const std::filesystem::path& path) { return format_of(path) != Format::Unknown; }

Raster read_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) fail_io("no such file: " + path.string());
  switch (format_of(path)) {
    case Format::Png: return read_png(path);
    case Format::Pnm: return read_pnm(path);
    case Format::Jpeg: return read_jpeg(path);
    case Format::Unknown: break;
  }
  fail_io("unrecognized image extension: " + path.string());
}

void write_image(const std::filesystem::path& path, const Raster& raster) {
  check_raster(raster);
  switch (format_of(path)) {
    case Format::Png: return write_png(path, raster);
    case Format::Pnm: {
      std::string ext = path.extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext == ".pgm" && !raster.is_gray()) fail_usage(".pgm output needs a gray image");
      if (ext == ".ppm" && raster.is_gray()) {
        Raster rgb{{raster.planes[0], raster.planes[0], raster.planes[0]}};
        return write_pnm(path, rgb);
      }
      return write_pnm(path, raster);
    }
    case Format::Jpeg: return write_jpeg(path, raster, 95);
    case Format::Unknown: break;
  }
  fail_usage("unrecognized output extension: " + path.string());
}

void write_image(const std::filesystem::path& path, const ImagePlane& gray) {
  Raster r;
  r.planes.push_back(gray);
  write_image(path, r);
}

}  // namespace raisr
