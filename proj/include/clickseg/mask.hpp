#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace clickseg {

/// Pixel position: x is the column, y the row, origin at the top-left.
/// Ordering is row-major (y first, then x), which is the tie-break order used
/// throughout the engine.
struct PixelCoord {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
  friend std::strong_ordering operator<=>(const PixelCoord& a, const PixelCoord& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Squared Euclidean distance between pixel centers.
constexpr std::int64_t squared_distance(PixelCoord a, PixelCoord b) {
  const std::int64_t dx = a.x - b.x;
  const std::int64_t dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Inclusive pixel bounds.
struct PixelBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  std::int64_t area() const {
    return static_cast<std::int64_t>(x_max - x_min + 1) * (y_max - y_min + 1);
  }
  bool contains(PixelCoord p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

struct Frame {
  int width = 256;
  int height = 256;
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Row-major binary raster. Values are stored as 0/1 bytes.
class BinaryMask {
 public:
  /// All-background mask. Throws DomainError unless width, height >= 1.
  BinaryMask(int width, int height);
  /// Takes ownership of `data` (nonzero = foreground).
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Frame frame() const noexcept { return {width_, height_}; }
  std::size_t size() const noexcept { return data_.size(); }

  bool at(int x, int y) const { return data_[index(x, y)] != 0; }
  bool at(PixelCoord p) const { return at(p.x, p.y); }
  void set(int x, int y, bool value) { data_[index(x, y)] = value ? 1 : 0; }
  void set(PixelCoord p, bool value) { set(p.x, p.y, value); }

  bool contains(PixelCoord p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  /// Foreground pixels in row-major order.
  std::vector<PixelCoord> foreground() const;

  std::span<const std::uint8_t> data() const noexcept { return data_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Pixel-wise set operations; both operands must share dimensions
/// (DomainError otherwise).
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);

/// Reads an 8-bit grayscale or RGB raster (PNG, PGM or PPM) and binarizes it:
/// a pixel is foreground iff its gray level is strictly above `threshold`.
/// RGB input is converted with Rec.601 luma weights.
BinaryMask load_mask(const std::filesystem::path& path, int threshold = 127);

/// Writes an 8-bit grayscale PNG, foreground 255, background 0.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Nearest-neighbor resampling: output (x, y) reads input
/// (floor((x + 0.5) * W / out_w), floor((y + 0.5) * H / out_h)).
BinaryMask resize_mask(const BinaryMask& mask, int out_w, int out_h);
inline BinaryMask resize_mask(const BinaryMask& mask, Frame frame) {
  return resize_mask(mask, frame.width, frame.height);
}

/// The pixel of `pixels` nearest to their coordinate mean. Exact integer
/// arithmetic; ties go to the smallest y, then the smallest x.
/// Throws DomainError for an empty set.
PixelCoord snapped_centroid(std::span<const PixelCoord> pixels);

/// Tight bounds of the foreground, or nullopt for an all-background mask.
std::optional<PixelBox> bounding_box(const BinaryMask& mask);

}  // namespace clickseg
