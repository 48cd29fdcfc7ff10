#pragma once

#include <cstdint>
#include <filesystem>

#include "clickseg/mask.hpp"

namespace clickseg {

struct SyntheticOptions {
  int count = 24;
  std::uint64_t seed = 7;
  double malignant_fraction = 0.4;
  /// Probability that an image carries a second lesion in its own mask file.
  double second_lesion_probability = 0.15;
  /// Frame of the generated predictions.
  Frame frame;
};

struct SyntheticCorpus {
  std::filesystem::path dataset_dir;
  std::filesystem::path predictions_dir;
  int images = 0;
  int mask_files = 0;
};

/// Writes a BUSI-style corpus of speckled ultrasound-like images:
///
///   <out>/dataset/{benign,malignant}/<class> (<i>).png
///   <out>/dataset/{benign,malignant}/<class> (<i>)_mask[_1].png
///   <out>/predictions/<class> (<i>).png    imperfect masks in `frame`
///
/// Output depends only on the options.
SyntheticCorpus generate_synthetic_corpus(const std::filesystem::path& out,
                                          const SyntheticOptions& options = {});

}  // namespace clickseg
