#include "clickseg/overlay.hpp"

namespace clickseg {

RgbImage render_decomposition(const ErrorDecomposition& dec) {
  RgbImage image(dec.tp.width(), dec.tp.height());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (dec.tp.at(x, y)) {
        image.at(x, y) = kTpColor;
      } else if (dec.fp.at(x, y)) {
        image.at(x, y) = kFpColor;
      } else if (dec.fn.at(x, y)) {
        image.at(x, y) = kFnColor;
      }
    }
  }
  return image;
}

RgbImage render_mask(const BinaryMask& mask, Rgb color) {
  RgbImage image(mask.width(), mask.height());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (mask.at(x, y)) image.at(x, y) = color;
    }
  }
  return image;
}

void draw_clicks(RgbImage& image, std::span<const ClickPrompt> clicks) {
  for (const auto& c : clicks) {
    const Rgb color = c.stage == 1 ? kStage1Color
                      : c.polarity == Polarity::Positive ? kPositiveColor
                                                         : kNegativeColor;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = c.x + dx;
        const int y = c.y + dy;
        if (x >= 0 && y >= 0 && x < image.width && y < image.height) image.at(x, y) = color;
      }
    }
  }
}

}  // namespace clickseg
