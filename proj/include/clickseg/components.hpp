#pragma once

#include <string_view>
#include <vector>

#include "clickseg/mask.hpp"

namespace clickseg {

enum class RegionKind { GT, TP, FP, FN };

std::string_view to_string(RegionKind kind);
/// Inverse of to_string; returns false for unknown names.
bool parse_region_kind(std::string_view text, RegionKind& out);

enum class Connectivity { Four = 4, Eight = 8 };

/// Throws DomainError for anything other than 4 or 8.
Connectivity connectivity_from_int(int value);

/// One connected component. `pixels` is sorted row-major.
struct Region {
  std::vector<PixelCoord> pixels;
  RegionKind kind = RegionKind::GT;
  int component_id = 0;

  std::size_t area() const noexcept { return pixels.size(); }
};

/// Maximal connected foreground sets. Ids follow the row-major position of
/// each component's first pixel, starting at 0.
std::vector<Region> label_components(const BinaryMask& mask,
                                     Connectivity connectivity = Connectivity::Eight,
                                     RegionKind kind = RegionKind::GT);

/// tp = pred & gt, fp = pred & !gt, fn = !pred & gt.
struct ErrorDecomposition {
  BinaryMask tp;
  BinaryMask fp;
  BinaryMask fn;

  const BinaryMask& mask_of(RegionKind kind) const;
};

ErrorDecomposition decompose_errors(const BinaryMask& pred, const BinaryMask& gt);

/// Components of the tp/fp/fn mask selected by `kind` (GT is rejected).
std::vector<Region> regions_of(const ErrorDecomposition& dec, RegionKind kind,
                               Connectivity connectivity = Connectivity::Eight);

}  // namespace clickseg
