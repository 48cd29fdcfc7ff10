#include "clickseg/components.hpp"

#include <algorithm>
#include <string>

#include "clickseg/errors.hpp"

namespace clickseg {

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::GT: return "GT";
    case RegionKind::TP: return "TP";
    case RegionKind::FP: return "FP";
    case RegionKind::FN: return "FN";
  }
  return "?";
}

bool parse_region_kind(std::string_view text, RegionKind& out) {
  for (auto k : {RegionKind::GT, RegionKind::TP, RegionKind::FP, RegionKind::FN}) {
    if (text == to_string(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

Connectivity connectivity_from_int(int value) {
  if (value == 4) return Connectivity::Four;
  if (value == 8) return Connectivity::Eight;
  throw DomainError("connectivity must be 4 or 8, got " + std::to_string(value));
}

std::vector<Region> label_components(const BinaryMask& mask, Connectivity connectivity,
                                     RegionKind kind) {
  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int neighbours = connectivity == Connectivity::Eight ? 8 : 4;
  const int w = mask.width();
  const int h = mask.height();

  std::vector<std::uint8_t> visited(mask.size(), 0);
  std::vector<Region> regions;
  std::vector<PixelCoord> stack;

  // Scanning row-major and flooding from each unvisited seed yields ids in
  // first-pixel order.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (visited[idx] || !mask.at(x, y)) continue;

      Region region;
      region.kind = kind;
      region.component_id = static_cast<int>(regions.size());
      visited[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        region.pixels.push_back(p);
        for (int n = 0; n < neighbours; ++n) {
          const int nx = p.x + kDx[n];
          const int ny = p.y + kDy[n];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (visited[nidx] || !mask.at(nx, ny)) continue;
          visited[nidx] = 1;
          stack.push_back({nx, ny});
        }
      }
      std::sort(region.pixels.begin(), region.pixels.end());
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

const BinaryMask& ErrorDecomposition::mask_of(RegionKind kind) const {
  switch (kind) {
    case RegionKind::TP: return tp;
    case RegionKind::FP: return fp;
    case RegionKind::FN: return fn;
    case RegionKind::GT: break;
  }
  throw DomainError("an error decomposition has no GT mask");
}

ErrorDecomposition decompose_errors(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.frame() != gt.frame()) {
    throw DomainError("decompose_errors: prediction is " + std::to_string(pred.width()) + "x" +
                      std::to_string(pred.height()) + " but ground truth is " +
                      std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  return {mask_and(pred, gt), mask_and_not(pred, gt), mask_and_not(gt, pred)};
}

std::vector<Region> regions_of(const ErrorDecomposition& dec, RegionKind kind,
                               Connectivity connectivity) {
  return label_components(dec.mask_of(kind), connectivity, kind);
}

}  // namespace clickseg
