#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "clickseg/components.hpp"
#include "clickseg/cvt.hpp"
#include "clickseg/mask.hpp"

namespace clickseg {

enum class Polarity { Positive = 1, Negative = -1 };

/// GT, TP and FN clicks are positive; FP clicks are negative.
constexpr Polarity polarity_for(RegionKind kind) {
  return kind == RegionKind::FP ? Polarity::Negative : Polarity::Positive;
}

struct ClickPrompt {
  int x = 0;
  int y = 0;
  Polarity polarity = Polarity::Positive;
  int stage = 1;
  RegionKind region_kind = RegionKind::GT;
  int component_id = 0;

  PixelCoord coord() const { return {x, y}; }
  friend bool operator==(const ClickPrompt&, const ClickPrompt&) = default;
};

struct PromptSet {
  std::string image_id;
  int stage = 1;
  Frame frame;
  std::vector<ClickPrompt> prompts;

  friend bool operator==(const PromptSet&, const PromptSet&) = default;
};

/// Prompt generation output; `warnings` is non-empty for degenerate inputs
/// such as an empty ground truth.
struct PromptGeneration {
  PromptSet prompts;
  std::vector<std::string> warnings;
};

struct PromptOptions {
  ClickBudgetPolicy policy;
  Connectivity connectivity = Connectivity::Eight;
  int max_lloyd_iterations = kDefaultLloydIterations;
};

/// One positive click at the snapped centroid of every ground-truth component
/// whose area reaches policy.min_area.
PromptGeneration stage1_prompts(const BinaryMask& gt, const PromptOptions& options = {},
                                std::string image_id = {});

/// Error-driven clicks: CVT-placed positive clicks in TP and FN components and
/// negative clicks in FP components, ordered TP, FN, FP, then by component id,
/// then by CVT output order.
PromptGeneration stage2_prompts(const BinaryMask& pred, const BinaryMask& gt,
                                const PromptOptions& options = {}, std::string image_id = {});

/// Clicks generated for one region, in CVT output order (empty when the
/// region is below the click budget's minimum area).
std::vector<ClickPrompt> region_clicks(const Region& region, int stage,
                                       const PromptOptions& options);

// Prompt file format, version 1 (UTF-8, '\n' line endings, TAB separated):
//
//   CLICKPROMPTS <tab> 1 <tab> <image_id> <tab> <stage> <tab> <W>x<H>
//   <x> <tab> <y> <tab> <+1|-1> <tab> <GT|TP|FN|FP> <tab> <component_id>
//   ...
//
// One header line followed by one record per click, each newline-terminated.
inline constexpr const char* kPromptMagic = "CLICKPROMPTS";
inline constexpr int kPromptFormatVersion = 1;

/// Throws FormatError when the set breaks a ClickPrompt/PromptSet invariant
/// (polarity/kind mismatch, out-of-frame click, duplicate position, stage
/// mismatch, image id containing a tab or newline).
void validate_prompts(const PromptSet& ps);

std::string format_prompts(const PromptSet& ps);
void write_prompts(std::ostream& out, const PromptSet& ps);
void serialize_prompts(const PromptSet& ps, const std::filesystem::path& path);

/// Throws ParseError (carrying the 1-based line) on malformed content and
/// FormatError when a record lies outside the header frame.
PromptSet parse_prompts(std::istream& in);
PromptSet parse_prompts_string(const std::string& text);
PromptSet parse_prompts(const std::filesystem::path& path);

}  // namespace clickseg
