#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace clickseg {

/// 8-bit single-channel raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Decodes PNG (any bit depth / color type), PGM (P2, P5) or PPM (P3, P6) to
/// 8-bit gray. Color input is reduced with Rec.601 luma, alpha is dropped and
/// 16-bit samples keep their high byte. The format is sniffed from the
/// content, not the extension.
GrayImage read_gray_image(const std::filesystem::path& path);

void write_gray_png(const GrayImage& image, const std::filesystem::path& path);
void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);
/// Binary PGM (P5, maxval 255).
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace clickseg
