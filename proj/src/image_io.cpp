#include "clickseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "clickseg/errors.hpp"

namespace clickseg {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

void check_dimensions(long width, long height, const std::filesystem::path& path) {
  if (width <= 0 || height <= 0) {
    throw FormatError("zero-dimension image: " + path.string());
  }
}

// libpng reports errors through longjmp; we record the message and convert it
// into an exception after the jump lands.
struct PngErrorState {
  std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) state->message = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

GrayImage read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngErrorState err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }

  GrayImage out;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  int channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("invalid PNG " + path.string() + ": " + err.message);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  check_dimensions(width, height, path);
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.pixels.resize(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const std::uint8_t* px = buffer.data() + i * channels;
    out.pixels[i] = channels >= 3 ? luma(px[0], px[1], px[2]) : px[0];
  }
  return out;
}

// Netpbm header tokens, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

long parse_header_int(std::istream& in, const std::filesystem::path& path) {
  const std::string token = next_token(in);
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("malformed netpbm header in " + path.string());
  }
}

GrayImage read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_token(in);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P5" && magic != "P3" && magic != "P6") {
    throw FormatError("unsupported netpbm variant in " + path.string());
  }
  const long width = parse_header_int(in, path);
  const long height = parse_header_int(in, path);
  const long maxval = parse_header_int(in, path);
  check_dimensions(width, height, path);
  if (maxval < 1 || maxval > 255) {
    throw FormatError("only 8-bit netpbm is supported: " + path.string());
  }

  const std::size_t channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> samples(count * channels);
  if (ascii) {
    for (auto& s : samples) {
      const long v = parse_header_int(in, path);
      if (v < 0 || v > maxval) throw FormatError("sample out of range in " + path.string());
      s = static_cast<std::uint8_t>(v);
    }
  } else {
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(samples.size()));
    if (static_cast<std::size_t>(in.gcount()) != samples.size()) {
      throw FormatError("truncated netpbm data in " + path.string());
    }
  }

  GrayImage out{static_cast<int>(width), static_cast<int>(height), {}};
  out.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* px = samples.data() + i * channels;
    out.pixels[i] = color ? luma(px[0], px[1], px[2]) : px[0];
  }
  return out;
}

void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               const std::uint8_t* data, std::size_t rowbytes) {
  FilePtr file = open_file(path, "wb");
  PngErrorState err;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(data + static_cast<std::size_t>(y) * rowbytes);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string() + ": " + err.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  // Fixed settings so identical rasters always encode to identical bytes.
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed writing " + path.string());
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path.string());
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), sizeof sig);
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();
  if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  if (got >= 2 && sig[0] == 'P' && (sig[1] == '2' || sig[1] == '3' || sig[1] == '5' || sig[1] == '6')) {
    return read_netpbm(path);
  }
  throw FormatError("unrecognized image format: " + path.string());
}

void write_gray_png(const GrayImage& image, const std::filesystem::path& path) {
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, image.pixels.data(),
            static_cast<std::size_t>(image.width));
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  static_assert(sizeof(Rgb) == 3);
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB,
            reinterpret_cast<const std::uint8_t*>(image.pixels.data()),
            static_cast<std::size_t>(image.width) * 3);
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace clickseg
