#include "clickseg/cvt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "clickseg/errors.hpp"

namespace clickseg {
namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max();
constexpr int kMaxDescentRounds = 2;

bool better_candidate(std::int64_t d, PixelCoord p, std::int64_t best_d, PixelCoord best) {
  return d > best_d || (d == best_d && p < best);
}

// Pixel maximizing the distance to the nearest of `others`; with no others,
// every pixel ties and the row-major first one is returned.
PixelCoord farthest_from(std::span<const PixelCoord> pixels, std::span<const PixelCoord> others) {
  PixelCoord best = pixels.front();
  std::int64_t best_d = -1;
  for (const auto& p : pixels) {
    std::int64_t d = kFar;
    for (const auto& o : others) d = std::min(d, squared_distance(p, o));
    if (better_candidate(d, p, best_d, best)) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

void require_in_region(std::span<const PixelCoord> sorted_pixels, std::span<const PixelCoord> clicks,
                       const char* op) {
  std::vector<PixelCoord> seen(clicks.begin(), clicks.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw DomainError(std::string(op) + ": clicks must be distinct");
  }
  for (const auto& c : clicks) {
    if (!std::binary_search(sorted_pixels.begin(), sorted_pixels.end(), c)) {
      throw DomainError(std::string(op) + ": click (" + std::to_string(c.x) + "," +
                        std::to_string(c.y) + ") lies outside the region");
    }
  }
}

// Farthest-point sampling starting at `first`.
std::vector<PixelCoord> farthest_point_seeds(std::span<const PixelCoord> pixels, PixelCoord first,
                                             std::size_t k) {
  std::vector<PixelCoord> seeds;
  seeds.reserve(k);
  seeds.push_back(first);

  std::vector<std::int64_t> nearest(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) nearest[i] = squared_distance(pixels[i], first);

  while (seeds.size() < k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pixels.size(); ++i) {
      if (better_candidate(nearest[i], pixels[i], nearest[best], pixels[best])) best = i;
    }
    const PixelCoord next = pixels[best];
    seeds.push_back(next);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(pixels[i], next));
    }
  }
  return seeds;
}

struct Move {
  std::size_t click = 0;
  PixelCoord to;
  std::int64_t energy = 0;
};

// Best single-click step to an 8-neighbouring region pixel, if it lowers the
// energy. Candidates are scanned by click index, then row-major offset.
std::optional<Move> best_neighbour_move(std::span<const PixelCoord> sorted_pixels,
                                        const std::vector<PixelCoord>& clicks, std::int64_t energy) {
  const std::size_t n = sorted_pixels.size();
  const std::size_t k = clicks.size();
  std::vector<std::size_t> owner(n);
  std::vector<std::int64_t> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = d2[i] = kFar;
    for (std::size_t c = 0; c < k; ++c) {
      const std::int64_t d = squared_distance(sorted_pixels[i], clicks[c]);
      if (d < d1[i]) {
        d2[i] = d1[i];
        d1[i] = d;
        owner[i] = c;
      } else if (d < d2[i]) {
        d2[i] = d;
      }
    }
  }

  // A one-pixel step of click c can only change pixels it owns and pixels
  // within sqrt(d1) + sqrt(2) of it.
  std::vector<std::vector<std::size_t>> touched(k);
  for (std::size_t i = 0; i < n; ++i) {
    const double reach = std::sqrt(static_cast<double>(d1[i])) + 1.5;
    for (std::size_t c = 0; c < k; ++c) {
      if (owner[i] == c || static_cast<double>(squared_distance(sorted_pixels[i], clicks[c])) < reach * reach) {
        touched[c].push_back(i);
      }
    }
  }

  std::optional<Move> best;
  for (std::size_t c = 0; c < k; ++c) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const PixelCoord to{clicks[c].x + dx, clicks[c].y + dy};
        if ((dx == 0 && dy == 0) || !std::binary_search(sorted_pixels.begin(), sorted_pixels.end(), to) ||
            std::find(clicks.begin(), clicks.end(), to) != clicks.end()) {
          continue;
        }
        std::int64_t e = energy;
        for (std::size_t i : touched[c]) {
          const std::int64_t rest = owner[i] == c ? d2[i] : d1[i];
          e += std::min(rest, squared_distance(sorted_pixels[i], to)) - d1[i];
        }
        if (e < (best ? best->energy : energy)) best = Move{c, to, e};
      }
    }
  }
  return best;
}

// Alternates Lloyd relaxation with improving neighbour steps, starting from
// a relaxed state.
CvtState descend(std::span<const PixelCoord> sorted_pixels, CvtState state, int max_iters) {
  for (int round = 0; round < kMaxDescentRounds; ++round) {
    const auto move = best_neighbour_move(sorted_pixels, state.clicks, state.energy);
    if (!move) break;
    std::vector<PixelCoord> moved = state.clicks;
    moved[move->click] = move->to;
    CvtState next = lloyd_relax(sorted_pixels, moved, max_iters);
    if (next.energy >= state.energy) break;
    state = std::move(next);
  }
  return state;
}

}  // namespace

void ClickBudgetPolicy::validate() const {
  if (min_area < 1 || area_per_click < 1 || max_clicks < 1) {
    throw DomainError("click budget policy fields must all be >= 1");
  }
}

int click_budget(std::size_t area, const ClickBudgetPolicy& policy) {
  policy.validate();
  if (area < static_cast<std::size_t>(policy.min_area)) return 0;
  const auto per = static_cast<std::size_t>(policy.area_per_click);
  // round-half-away-from-zero of area / per for nonnegative integers
  const std::size_t rounded = (2 * area + per) / (2 * per);
  return static_cast<int>(
      std::clamp<std::size_t>(rounded, 1, static_cast<std::size_t>(policy.max_clicks)));
}

std::vector<PixelCoord> seed_clicks(std::span<const PixelCoord> pixels, std::size_t k) {
  if (k < 1 || k > pixels.size()) {
    throw DomainError("seed_clicks: need 1 <= k <= area, got k=" + std::to_string(k) +
                      " for area " + std::to_string(pixels.size()));
  }
  return farthest_point_seeds(pixels, snapped_centroid(pixels), k);
}

std::int64_t cvt_energy(std::span<const PixelCoord> pixels, std::span<const PixelCoord> clicks) {
  if (clicks.empty()) throw DomainError("cvt_energy: click list is empty");
  std::int64_t total = 0;
  for (const auto& p : pixels) {
    std::int64_t d = kFar;
    for (const auto& c : clicks) d = std::min(d, squared_distance(p, c));
    total += d;
  }
  return total;
}

CvtState lloyd_relax(std::span<const PixelCoord> pixels, std::span<const PixelCoord> seeds,
                     int max_iters) {
  if (seeds.empty()) throw DomainError("lloyd_relax: no seeds");
  if (max_iters < 0) throw DomainError("lloyd_relax: max_iters must be >= 0");
  if (std::is_sorted(pixels.begin(), pixels.end())) {
    require_in_region(pixels, seeds, "lloyd_relax");
  } else {
    std::vector<PixelCoord> sorted(pixels.begin(), pixels.end());
    std::sort(sorted.begin(), sorted.end());
    require_in_region(sorted, seeds, "lloyd_relax");
  }

  const std::size_t n = pixels.size();
  const std::size_t k = seeds.size();

  CvtState state;
  state.clicks.assign(seeds.begin(), seeds.end());

  std::vector<std::size_t> owner(n);
  std::vector<std::int64_t> sum_x(k), sum_y(k), count(k);
  std::vector<PixelCoord> next(k);
  std::vector<bool> has_next(k);

  // Step (a): assignment; returns the energy of the current clicks.
  auto assign = [&]() {
    std::int64_t energy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      std::int64_t best_d = squared_distance(pixels[i], state.clicks[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const std::int64_t d = squared_distance(pixels[i], state.clicks[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      owner[i] = best;
      energy += best_d;
    }
    return energy;
  };

  bool have_energy = false;
  while (state.iterations < max_iters) {
    state.energy_history.push_back(assign());
    have_energy = true;

    // Step (b): move each click to the in-cell pixel nearest the cell mean.
    std::fill(sum_x.begin(), sum_x.end(), 0);
    std::fill(sum_y.begin(), sum_y.end(), 0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum_x[owner[i]] += pixels[i].x;
      sum_y[owner[i]] += pixels[i].y;
      ++count[owner[i]];
    }
    using Wide = __int128;
    std::vector<Wide> best_d(k, -1);
    std::fill(has_next.begin(), has_next.end(), false);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = owner[i];
      const Wide dx = Wide{count[c]} * pixels[i].x - sum_x[c];
      const Wide dy = Wide{count[c]} * pixels[i].y - sum_y[c];
      const Wide d = dx * dx + dy * dy;
      if (!has_next[c] || d < best_d[c] || (d == best_d[c] && pixels[i] < next[c])) {
        has_next[c] = true;
        best_d[c] = d;
        next[c] = pixels[i];
      }
    }

    // Step (c): empty cells and collisions are re-seeded in index order.
    bool reseeded = false;
    for (std::size_t c = 0; c < k; ++c) {
      const bool collides =
          has_next[c] && std::find(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(c),
                                   next[c]) != next.begin() + static_cast<std::ptrdiff_t>(c);
      if (has_next[c] && !collides) continue;
      std::vector<PixelCoord> others;
      others.reserve(k - 1);
      for (std::size_t o = 0; o < k; ++o) {
        if (o != c && has_next[o]) others.push_back(next[o]);
      }
      next[c] = farthest_from(pixels, others);
      has_next[c] = true;
      reseeded = true;
    }

    ++state.iterations;
    state.reseeded.push_back(reseeded);
    if (std::equal(next.begin(), next.end(), state.clicks.begin())) {
      state.converged = true;
      break;
    }
    state.clicks = next;
    have_energy = false;
  }

  if (have_energy) {
    state.energy = state.energy_history.back();
  } else {
    state.energy = cvt_energy(pixels, state.clicks);
    state.energy_history.push_back(state.energy);
  }
  return state;
}

CvtState place_clicks(const Region& region, std::size_t k, int max_iters) {
  const auto seeds = seed_clicks(region, k);
  // One click always relaxes to the snapped centroid.
  if (k == 1) return lloyd_relax(region, seeds, max_iters);

  std::vector<PixelCoord> sorted = region.pixels;
  std::sort(sorted.begin(), sorted.end());
  const auto anchors = seed_clicks(sorted, std::min(kCvtStarts, sorted.size()));
  std::optional<CvtState> best;
  std::vector<std::vector<PixelCoord>> relaxed;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    CvtState start = lloyd_relax(sorted, a == 0 ? seeds : farthest_point_seeds(sorted, anchors[a], k),
                                 max_iters);
    // Identical relaxed clicks descend identically.
    if (std::find(relaxed.begin(), relaxed.end(), start.clicks) != relaxed.end()) continue;
    relaxed.push_back(start.clicks);
    CvtState candidate = descend(sorted, std::move(start), max_iters);
    if (!best || candidate.energy < best->energy) best = std::move(candidate);
  }
  return std::move(*best);
}

BruteForceCvt brute_force_cvt(std::span<const PixelCoord> pixels, std::size_t k) {
  if (pixels.size() > kBruteForceMaxArea || k > kBruteForceMaxClicks) {
    throw DomainError("brute_force_cvt: instance too large (area " +
                      std::to_string(pixels.size()) + ", k " + std::to_string(k) + ")");
  }
  if (k < 1 || k > pixels.size()) {
    throw DomainError("brute_force_cvt: need 1 <= k <= area");
  }
  std::vector<PixelCoord> sorted(pixels.begin(), pixels.end());
  std::sort(sorted.begin(), sorted.end());

  BruteForceCvt best;
  bool found = false;
  auto consider = [&](std::vector<PixelCoord> clicks) {
    const std::int64_t e = cvt_energy(sorted, clicks);
    if (!found || e < best.energy || (e == best.energy && clicks < best.clicks)) {
      found = true;
      best.energy = e;
      best.clicks = std::move(clicks);
    }
  };
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (k == 1) {
      consider({sorted[i]});
      continue;
    }
    for (std::size_t j = i + 1; j < sorted.size(); ++j) consider({sorted[i], sorted[j]});
  }
  return best;
}

}  // namespace clickseg
