#pragma once

#include <string>
#include <vector>

#include "clickseg/mask.hpp"

namespace clickseg {

/// Per-pixel foreground probabilities in [0, 1], row-major.
class ProbabilityMask {
 public:
  /// Throws DomainError on bad dimensions or any value outside [0, 1].
  ProbabilityMask(int width, int height, std::vector<double> data);
  /// 0/1 probabilities from a binary mask.
  static ProbabilityMask from_mask(const BinaryMask& mask);
  static ProbabilityMask constant(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Frame frame() const noexcept { return {width_, height_}; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

/// |a & b| / |a | b|; 1 when both are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);
/// IoU of the tight bounding boxes; 1 when both are empty, 0 when one is.
double bbox_iou(const BinaryMask& a, const BinaryMask& b);
/// IoU of two inclusive pixel boxes.
double box_iou(const PixelBox& a, const PixelBox& b);
/// 2|a & b| / (|a| + |b|); 1 when both are empty.
double dice_coeff(const BinaryMask& a, const BinaryMask& b);

inline constexpr double kDiceLossEpsilon = 1e-6;
inline constexpr double kBceClip = 1e-7;

/// 1 - (2 sum(p g) + eps) / (sum(p) + sum(g) + eps).
double dice_loss(const ProbabilityMask& p, const BinaryMask& g, double epsilon = kDiceLossEpsilon);
/// Mean binary cross-entropy with p clipped to [clip, 1 - clip].
double bce_loss(const ProbabilityMask& p, const BinaryMask& g, double clip = kBceClip);

struct MetricReport {
  std::string image_id;
  double mask_iou = 0.0;
  double bbox_iou = 0.0;
  double dice = 0.0;
};

MetricReport evaluate(const BinaryMask& pred, const BinaryMask& gt, std::string image_id = {});

}  // namespace clickseg
