#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clickseg/components.hpp"
#include "clickseg/mask.hpp"

namespace clickseg {

/// Maps a region's area to a number of clicks.
struct ClickBudgetPolicy {
  int min_area = 10;
  int area_per_click = 400;
  int max_clicks = 10;

  /// Throws DomainError if any field is below 1.
  void validate() const;
};

/// 0 below `min_area`, otherwise round(area / area_per_click) (halves away
/// from zero) clamped to [1, max_clicks].
int click_budget(std::size_t area, const ClickBudgetPolicy& policy = {});

/// Farthest-point initialization: the snapped centroid first, then repeatedly
/// the pixel farthest from its nearest chosen seed (ties row-major).
/// Requires 1 <= k <= pixels.size().
std::vector<PixelCoord> seed_clicks(std::span<const PixelCoord> pixels, std::size_t k);
inline std::vector<PixelCoord> seed_clicks(const Region& region, std::size_t k) {
  return seed_clicks(region.pixels, k);
}

/// Sum over pixels of the squared distance to the nearest click.
/// Throws DomainError for an empty click list.
std::int64_t cvt_energy(std::span<const PixelCoord> pixels, std::span<const PixelCoord> clicks);
inline std::int64_t cvt_energy(const Region& region, std::span<const PixelCoord> clicks) {
  return cvt_energy(region.pixels, clicks);
}

struct CvtState {
  std::vector<PixelCoord> clicks;
  std::int64_t energy = 0;
  int iterations = 0;
  bool converged = false;

  /// energy_history[t] is the energy of the clicks produced by iteration t
  /// (index 0 holds the seeds); the last entry always equals `energy`.
  std::vector<std::int64_t> energy_history;
  /// reseeded[t] is set when iteration t + 1 had to re-seed a click.
  std::vector<bool> reseeded;
};

inline constexpr int kDefaultLloydIterations = 100;

/// Discrete Lloyd relaxation restricted to the region's pixels.
///
/// Each iteration assigns every pixel to its nearest click (ties to the lower
/// click index), then moves each click to the pixel of its own cell nearest
/// the cell mean (ties row-major). A click whose cell is empty or which lands
/// on another click is re-seeded at the pixel farthest from all other clicks.
/// Stops once an iteration moves nothing, or after `max_iters` iterations.
///
/// Seeds must be nonempty, distinct and inside the region (DomainError
/// otherwise).
CvtState lloyd_relax(std::span<const PixelCoord> pixels, std::span<const PixelCoord> seeds,
                     int max_iters = kDefaultLloydIterations);
inline CvtState lloyd_relax(const Region& region, std::span<const PixelCoord> seeds,
                            int max_iters = kDefaultLloydIterations) {
  return lloyd_relax(region.pixels, seeds, max_iters);
}

inline constexpr std::size_t kCvtStarts = 8;

/// Click placement used for prompts. k = 1 is lloyd_relax(seed_clicks(region, 1)),
/// i.e. the snapped centroid. For k >= 2 Lloyd runs from up to kCvtStarts
/// farthest-point seedings, anchored at the first kCvtStarts farthest-point
/// samples (the first is seed_clicks itself). Each relaxed run then gets up to
/// two rounds of: step one click to an 8-neighbour pixel if that lowers the
/// energy, and relax again. The lowest-energy run wins, earlier runs on ties.
/// The returned state is the last lloyd_relax state of that run.
CvtState place_clicks(const Region& region, std::size_t k,
                      int max_iters = kDefaultLloydIterations);

struct BruteForceCvt {
  std::vector<PixelCoord> clicks;  // row-major sorted
  std::int64_t energy = 0;
};

inline constexpr std::size_t kBruteForceMaxArea = 16;
inline constexpr std::size_t kBruteForceMaxClicks = 2;

/// Exact minimizer over all k-subsets of the pixels; among equal energies the
/// lexicographically smallest (row-major) click list wins. Limited to
/// area <= 16 and k <= 2.
BruteForceCvt brute_force_cvt(std::span<const PixelCoord> pixels, std::size_t k);
inline BruteForceCvt brute_force_cvt(const Region& region, std::size_t k) {
  return brute_force_cvt(region.pixels, k);
}

}  // namespace clickseg
