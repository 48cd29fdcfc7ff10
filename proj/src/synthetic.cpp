#include "clickseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "clickseg/errors.hpp"
#include "clickseg/image_io.hpp"
#include "clickseg/rng.hpp"

namespace fs = std::filesystem;

namespace clickseg {
namespace {

// Rotated ellipse with an optional sinusoidal boundary ripple.
struct Lesion {
  double cx = 0, cy = 0;
  double rx = 1, ry = 1;
  double angle = 0;
  double ripple = 0;
  int lobes = 0;
  double phase = 0;

  bool contains(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = (c * dx + s * dy) / rx;
    const double v = (-s * dx + c * dy) / ry;
    const double rho = std::hypot(u, v);
    const double limit = 1.0 + ripple * std::sin(lobes * std::atan2(v, u) + phase);
    return rho <= limit;
  }
};

Lesion random_lesion(Rng& rng, int w, int h, bool malignant) {
  Lesion l;
  const double scale = std::min(w, h);
  l.rx = scale * rng.uniform(0.10, 0.22);
  l.ry = l.rx * rng.uniform(0.55, 1.0);
  l.cx = rng.uniform(0.3, 0.7) * w;
  l.cy = rng.uniform(0.3, 0.7) * h;
  l.angle = rng.uniform(0.0, std::numbers::pi);
  if (malignant) {
    l.ripple = rng.uniform(0.12, 0.3);
    l.lobes = rng.between(3, 7);
    l.phase = rng.uniform(0.0, 2 * std::numbers::pi);
  }
  return l;
}

GrayImage render_lesion_mask(const Lesion& lesion, int w, int h) {
  GrayImage mask{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (lesion.contains(x, y)) mask.pixels[static_cast<std::size_t>(y) * w + x] = 255;
    }
  }
  return mask;
}

// Mask sampled on `frame` pixel centers mapped back into the image plane.
GrayImage render_in_frame(const std::vector<Lesion>& lesions, int w, int h, Frame frame) {
  GrayImage mask{frame.width, frame.height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(frame.width) * frame.height, 0)};
  for (int y = 0; y < frame.height; ++y) {
    const double sy = (y + 0.5) * h / frame.height - 0.5;
    for (int x = 0; x < frame.width; ++x) {
      const double sx = (x + 0.5) * w / frame.width - 0.5;
      for (const auto& l : lesions) {
        if (l.contains(sx, sy)) {
          mask.pixels[static_cast<std::size_t>(y) * frame.width + x] = 255;
          break;
        }
      }
    }
  }
  return mask;
}

Lesion perturb(const Lesion& l, Rng& rng, double size) {
  Lesion p = l;
  p.cx += rng.uniform(-0.06, 0.06) * size;
  p.cy += rng.uniform(-0.06, 0.06) * size;
  p.rx *= rng.uniform(0.8, 1.15);
  p.ry *= rng.uniform(0.8, 1.15);
  p.angle += rng.uniform(-0.3, 0.3);
  p.ripple *= rng.uniform(0.0, 1.0);
  return p;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const fs::path& out, const SyntheticOptions& options) {
  if (options.count < 1) throw DomainError("synthetic corpus needs at least one image");
  SyntheticCorpus corpus;
  corpus.dataset_dir = out / "dataset";
  corpus.predictions_dir = out / "predictions";
  fs::create_directories(corpus.dataset_dir / "benign");
  fs::create_directories(corpus.dataset_dir / "malignant");
  fs::create_directories(corpus.predictions_dir);

  Rng rng(options.seed);
  int benign = 0;
  int malignant = 0;
  for (int i = 0; i < options.count; ++i) {
    const bool is_malignant = rng.chance(options.malignant_fraction);
    const std::string cls = is_malignant ? "malignant" : "benign";
    const int index = is_malignant ? ++malignant : ++benign;
    const std::string id = cls + " (" + std::to_string(index) + ")";
    const int w = rng.between(200, 320);
    const int h = rng.between(180, 300);

    std::vector<Lesion> lesions{random_lesion(rng, w, h, is_malignant)};
    if (rng.chance(options.second_lesion_probability)) {
      Lesion extra = random_lesion(rng, w, h, is_malignant);
      extra.rx *= 0.5;
      extra.ry *= 0.5;
      lesions.push_back(extra);
    }

    GrayImage image{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double base = 110.0 + 40.0 * y / h;
        for (const auto& l : lesions) {
          if (l.contains(x, y)) base = 45.0;
        }
        const double speckle = rng.uniform(0.55, 1.45);
        image.pixels[static_cast<std::size_t>(y) * w + x] =
            static_cast<std::uint8_t>(std::clamp(base * speckle, 0.0, 255.0));
      }
    }

    const fs::path dir = corpus.dataset_dir / cls;
    write_gray_png(image, dir / (id + ".png"));
    for (std::size_t m = 0; m < lesions.size(); ++m) {
      const std::string suffix = m == 0 ? "_mask" : "_mask_" + std::to_string(m);
      write_gray_png(render_lesion_mask(lesions[m], w, h), dir / (id + suffix + ".png"));
      ++corpus.mask_files;
    }

    std::vector<Lesion> predicted;
    const double size = std::min(w, h);
    for (const auto& l : lesions) {
      if (predicted.size() > 0 && rng.chance(0.3)) continue;
      predicted.push_back(perturb(l, rng, size));
    }
    if (rng.chance(0.3)) {
      Lesion spurious = random_lesion(rng, w, h, false);
      spurious.rx *= 0.35;
      spurious.ry *= 0.35;
      predicted.push_back(spurious);
    }
    write_gray_png(render_in_frame(predicted, w, h, options.frame),
                   corpus.predictions_dir / (id + ".png"));
    ++corpus.images;
  }
  return corpus;
}

}  // namespace clickseg
