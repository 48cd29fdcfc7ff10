#include "clickseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "clickseg/errors.hpp"

namespace clickseg {
namespace {

struct Overlap {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t both = 0;
};

template <typename FrameA, typename FrameB>
void require_same_frame(const FrameA& a, const FrameB& b, const char* op) {
  if (a.frame() != b.frame()) {
    throw DomainError(std::string(op) + ": dimensions differ (" + std::to_string(a.width()) + "x" +
                      std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                      std::to_string(b.height()) + ")");
  }
}

Overlap overlap(const BinaryMask& a, const BinaryMask& b, const char* op) {
  require_same_frame(a, b, op);
  Overlap o;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    o.a += da[i];
    o.b += db[i];
    o.both += da[i] & db[i];
  }
  return o;
}

}  // namespace

ProbabilityMask::ProbabilityMask(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) throw DomainError("probability mask dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DomainError("probability mask data length does not match width*height");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("probability outside [0, 1]");
  }
}

ProbabilityMask ProbabilityMask::from_mask(const BinaryMask& mask) {
  const auto d = mask.data();
  return ProbabilityMask(mask.width(), mask.height(), std::vector<double>(d.begin(), d.end()));
}

ProbabilityMask ProbabilityMask::constant(int width, int height, double value) {
  const std::size_t n = width > 0 && height > 0 ? static_cast<std::size_t>(width) * height : 0;
  return ProbabilityMask(width, height, std::vector<double>(n, value));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const Overlap o = overlap(a, b, "mask_iou");
  const std::int64_t uni = o.a + o.b - o.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.both) / static_cast<double>(uni);
}

double box_iou(const PixelBox& a, const PixelBox& b) {
  const int ix0 = std::max(a.x_min, b.x_min);
  const int iy0 = std::max(a.y_min, b.y_min);
  const int ix1 = std::min(a.x_max, b.x_max);
  const int iy1 = std::min(a.y_max, b.y_max);
  const std::int64_t inter =
      ix1 < ix0 || iy1 < iy0 ? 0 : PixelBox{ix0, iy0, ix1, iy1}.area();
  const std::int64_t uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double bbox_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_frame(a, b, "bbox_iou");
  const auto ba = bounding_box(a);
  const auto bb = bounding_box(b);
  if (!ba && !bb) return 1.0;
  if (!ba || !bb) return 0.0;
  return box_iou(*ba, *bb);
}

double dice_coeff(const BinaryMask& a, const BinaryMask& b) {
  const Overlap o = overlap(a, b, "dice_coeff");
  if (o.a + o.b == 0) return 1.0;
  return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

double dice_loss(const ProbabilityMask& p, const BinaryMask& g, double epsilon) {
  require_same_frame(p, g, "dice_loss");
  if (!(epsilon > 0.0)) throw DomainError("dice_loss: epsilon must be positive");
  const auto gd = g.data();
  double inter = 0.0;
  double sum_p = 0.0;
  double sum_g = 0.0;
  for (std::size_t i = 0; i < gd.size(); ++i) {
    inter += p.data()[i] * gd[i];
    sum_p += p.data()[i];
    sum_g += gd[i];
  }
  return 1.0 - (2.0 * inter + epsilon) / (sum_p + sum_g + epsilon);
}

double bce_loss(const ProbabilityMask& p, const BinaryMask& g, double clip) {
  require_same_frame(p, g, "bce_loss");
  if (!(clip > 0.0 && clip < 0.5)) throw DomainError("bce_loss: clip must lie in (0, 0.5)");
  const auto gd = g.data();
  double total = 0.0;
  for (std::size_t i = 0; i < gd.size(); ++i) {
    const double q = std::clamp(p.data()[i], clip, 1.0 - clip);
    total -= gd[i] ? std::log(q) : std::log1p(-q);
  }
  return total / static_cast<double>(gd.size());
}

MetricReport evaluate(const BinaryMask& pred, const BinaryMask& gt, std::string image_id) {
  return {std::move(image_id), mask_iou(pred, gt), bbox_iou(pred, gt), dice_coeff(pred, gt)};
}

}  // namespace clickseg
