#pragma once

#include <span>

#include "clickseg/components.hpp"
#include "clickseg/image_io.hpp"
#include "clickseg/prompts.hpp"

namespace clickseg {

inline constexpr Rgb kTpColor{255, 255, 255};
inline constexpr Rgb kFpColor{255, 165, 0};
inline constexpr Rgb kFnColor{0, 0, 255};
inline constexpr Rgb kMaskColor{128, 128, 128};
inline constexpr Rgb kStage1Color{30, 144, 255};
inline constexpr Rgb kPositiveColor{0, 200, 0};
inline constexpr Rgb kNegativeColor{220, 0, 0};

/// TP white, FP orange, FN blue on black.
RgbImage render_decomposition(const ErrorDecomposition& dec);

RgbImage render_mask(const BinaryMask& mask, Rgb color = kMaskColor);

/// Stamps a 3x3 marker per click: stage-1 clicks blue, stage-2 positive
/// green, negative red.
void draw_clicks(RgbImage& image, std::span<const ClickPrompt> clicks);

}  // namespace clickseg
