#include "clickseg/mask.hpp"

#include <algorithm>
#include <string>

#include "clickseg/errors.hpp"
#include "clickseg/image_io.hpp"

namespace clickseg {
namespace {

void require_same_frame(const BinaryMask& a, const BinaryMask& b, const char* op) {
  if (a.frame() != b.frame()) {
    throw DomainError(std::string(op) + ": mask dimensions differ (" + std::to_string(a.width()) +
                      "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                      "x" + std::to_string(b.height()) + ")");
  }
}

template <typename Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, const char* name, Op op) {
  require_same_frame(a, b, name);
  std::vector<std::uint8_t> out(a.size());
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(da[i], db[i]) ? 1 : 0;
  return BinaryMask(a.width(), a.height(), std::move(out));
}

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(width > 0 && height > 0
                                               ? static_cast<std::size_t>(width) * height
                                               : 0)) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw DomainError("mask dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DomainError("mask data length does not match width*height");
  }
  for (auto& v : data_) v = v != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

std::vector<PixelCoord> BinaryMask::foreground() const {
  std::vector<PixelCoord> out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and", [](auto p, auto q) { return p && q; });
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and_not", [](auto p, auto q) { return p && !q; });
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_or", [](auto p, auto q) { return p || q; });
}

BinaryMask load_mask(const std::filesystem::path& path, int threshold) {
  const GrayImage image = read_gray_image(path);
  std::vector<std::uint8_t> data(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), data.begin(),
                 [threshold](std::uint8_t v) { return v > threshold ? 1 : 0; });
  return BinaryMask(image.width, image.height, std::move(data));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  GrayImage image{mask.width(), mask.height(), {}};
  image.pixels.resize(mask.size());
  const auto data = mask.data();
  std::transform(data.begin(), data.end(), image.pixels.begin(),
                 [](std::uint8_t v) { return v ? 255 : 0; });
  write_gray_png(image, path);
}

BinaryMask resize_mask(const BinaryMask& mask, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw DomainError("resize target must be positive, got " + std::to_string(out_w) + "x" +
                      std::to_string(out_h));
  }
  if (out_w == mask.width() && out_h == mask.height()) return mask;

  // floor((x + 0.5) * W / out_w) == floor((2x + 1) * W / (2 out_w)) in integers.
  const std::int64_t in_w = mask.width();
  const std::int64_t in_h = mask.height();
  std::vector<int> src_x(static_cast<std::size_t>(out_w));
  for (int x = 0; x < out_w; ++x) {
    src_x[x] = static_cast<int>((2 * std::int64_t{x} + 1) * in_w / (2 * std::int64_t{out_w}));
  }
  BinaryMask out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const int sy = static_cast<int>((2 * std::int64_t{y} + 1) * in_h / (2 * std::int64_t{out_h}));
    for (int x = 0; x < out_w; ++x) {
      if (mask.at(src_x[x], sy)) out.set(x, y, true);
    }
  }
  return out;
}

PixelCoord snapped_centroid(std::span<const PixelCoord> pixels) {
  if (pixels.empty()) throw DomainError("snapped_centroid of an empty region");

  // Compare n * (p - mean) to stay in exact integer arithmetic.
  const std::int64_t n = static_cast<std::int64_t>(pixels.size());
  std::int64_t sum_x = 0;
  std::int64_t sum_y = 0;
  for (const auto& p : pixels) {
    sum_x += p.x;
    sum_y += p.y;
  }

  using Wide = __int128;
  PixelCoord best = pixels.front();
  Wide best_d = 0;
  bool first = true;
  for (const auto& p : pixels) {
    const Wide dx = Wide{n} * p.x - sum_x;
    const Wide dy = Wide{n} * p.y - sum_y;
    const Wide d = dx * dx + dy * dy;
    if (first || d < best_d || (d == best_d && p < best)) {
      first = false;
      best_d = d;
      best = p;
    }
  }
  return best;
}

std::optional<PixelBox> bounding_box(const BinaryMask& mask) {
  PixelBox box{mask.width(), mask.height(), -1, -1};
  bool any = false;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      any = true;
      box.x_min = std::min(box.x_min, x);
      box.y_min = std::min(box.y_min, y);
      box.x_max = std::max(box.x_max, x);
      box.y_max = std::max(box.y_max, y);
    }
  }
  if (!any) return std::nullopt;
  return box;
}

}  // namespace clickseg
