#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clickseg/dataset.hpp"
#include "clickseg/metrics.hpp"
#include "clickseg/prompts.hpp"

namespace clickseg {

enum class BatchMode { Stage1, Stage2, Eval };

struct BatchOptions {
  std::filesystem::path out_dir;
  /// Holds <image_id>.png masks in the target frame; required for stage2/eval.
  std::filesystem::path predictions_dir;
  Frame frame;
  PromptOptions prompt;
  int threshold = 127;
  /// Restrict the batch to one split; nullopt processes every entry.
  std::optional<Split> subset;
  /// Also write <image_id>.overlay.png next to each prompt file.
  bool overlay = false;
  /// Report bbox IoU as the headline metric of the summary line.
  bool bbox_headline = false;
  /// Worker threads; outputs are identical for any value.
  unsigned jobs = 1;
};

struct ImageOutcome {
  std::string image_id;
  bool ok = false;
  std::string error;
  std::vector<std::string> warnings;
  std::size_t clicks = 0;
  std::optional<MetricReport> metrics;
};

struct BatchSummary {
  BatchMode mode = BatchMode::Stage1;
  std::vector<ImageOutcome> images;  // manifest order
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t clicks = 0;
  /// Means over successfully evaluated images (eval mode only).
  std::optional<MetricReport> mean;
  bool bbox_headline = false;

  /// e.g. "3 ok, 0 failed" plus click totals or mean metrics.
  std::string summary_line() const;
};

/// Generates prompt files (stage1/stage2) or metric reports (eval) for every
/// selected manifest entry. Per-image failures are recorded and the batch
/// continues. Writes <out>/summary.txt; eval also writes report.txt and
/// report.csv.
BatchSummary run_batch(const DatasetManifest& manifest, BatchMode mode,
                       const BatchOptions& options);

std::string format_report_table(const BatchSummary& summary);
std::string format_report_csv(const BatchSummary& summary);

}  // namespace clickseg
