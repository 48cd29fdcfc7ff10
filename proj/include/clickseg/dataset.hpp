#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clickseg/mask.hpp"

namespace clickseg {

enum class ClassLabel { Benign, Malignant, Normal };
enum class Split { Unassigned, Train, Test };

std::string_view to_string(ClassLabel label);
std::string_view to_string(Split split);
std::optional<ClassLabel> parse_class_label(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

struct DatasetEntry {
  std::string image_id;
  ClassLabel class_label = ClassLabel::Benign;
  /// Relative to the manifest root, '/' separated.
  std::string image_path;
  std::vector<std::string> mask_paths;
  Split split = Split::Unassigned;

  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

struct DatasetManifest {
  std::string root;
  std::optional<std::uint64_t> seed;
  std::vector<DatasetEntry> entries;

  std::filesystem::path resolve(const std::string& relative) const {
    return std::filesystem::path(root) / relative;
  }
  std::size_t count(Split split) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct ScanOptions {
  /// BUSI also ships a "normal" class; it is skipped unless enabled.
  bool include_normal = false;
};

struct ScanResult {
  DatasetManifest manifest;
  std::vector<std::string> warnings;
};

/// Walks `root` recursively. Every .png/.pgm/.ppm file whose stem does not end
/// in "_mask" or "_mask_<n>" is an image; its masks are the siblings named
/// "<stem>_mask.<ext>" and "<stem>_mask_<n>.<ext>". The class comes from the
/// containing folder (benign/malignant/normal) or else the filename prefix.
/// Images without masks or without a recognizable class are excluded with a
/// warning. Entries are sorted by image id.
ScanResult scan_dataset(const std::filesystem::path& root, const ScanOptions& options = {});

/// Pixel-wise union of the masks. Throws FormatError on a size mismatch and
/// DomainError for an empty path list.
BinaryMask merge_masks(const std::vector<std::filesystem::path>& mask_paths, int threshold = 127);

/// Ground truth of one entry: merged masks resized to `frame`.
BinaryMask load_ground_truth(const DatasetManifest& manifest, const DatasetEntry& entry,
                             Frame frame, int threshold = 127);

inline constexpr double kDefaultTrainFraction = 0.8;

/// floor(fraction * n), tolerant to representation error in the product.
std::size_t train_count(std::size_t n, double fraction);

/// Seeded uniform shuffle over entries ordered by image id; the first
/// train_count(N, fraction) go to train, the rest to test. With `stratified`
/// each class is shuffled separately and the train total is apportioned by
/// largest remainder, so the overall counts are unchanged.
/// Requires every entry unassigned and 0 < fraction < 1 (DomainError).
DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction, std::uint64_t seed,
                              bool stratified = false);

/// Resets every entry to unassigned and drops the seed.
DatasetManifest clear_split(DatasetManifest manifest);

// Manifest file, version 1 (UTF-8, TAB separated):
//
//   CLICKMANIFEST <tab> 1
//   root <tab> <dataset root>
//   seed <tab> <decimal seed or ->
//   <image_id> <tab> <class> <tab> <split> <tab> <image path> <tab> <mask path> [<tab> <mask path> ...]
inline constexpr const char* kManifestMagic = "CLICKMANIFEST";
inline constexpr int kManifestFormatVersion = 1;

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(std::istream& in);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace clickseg
