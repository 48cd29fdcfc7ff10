#include "clickseg/prompts.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "clickseg/errors.hpp"

namespace clickseg {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_frame(std::string_view text, Frame& out) {
  const std::size_t x = text.find('x');
  if (x == std::string_view::npos) return false;
  return parse_int(text.substr(0, x), out.width) && parse_int(text.substr(x + 1), out.height) &&
         out.width >= 1 && out.height >= 1;
}

void append_region_clicks(std::vector<ClickPrompt>& out, const std::vector<Region>& regions,
                          int stage, const PromptOptions& options) {
  for (const auto& region : regions) {
    auto clicks = region_clicks(region, stage, options);
    out.insert(out.end(), clicks.begin(), clicks.end());
  }
}

}  // namespace

std::vector<ClickPrompt> region_clicks(const Region& region, int stage,
                                       const PromptOptions& options) {
  const int budget = click_budget(region.area(), options.policy);
  if (budget == 0) return {};
  const auto coords =
      place_clicks(region, static_cast<std::size_t>(budget), options.max_lloyd_iterations).clicks;
  std::vector<ClickPrompt> clicks;
  clicks.reserve(coords.size());
  for (const auto& c : coords) {
    clicks.push_back({c.x, c.y, polarity_for(region.kind), stage, region.kind, region.component_id});
  }
  return clicks;
}

PromptGeneration stage1_prompts(const BinaryMask& gt, const PromptOptions& options,
                                std::string image_id) {
  options.policy.validate();
  PromptGeneration result;
  result.prompts.image_id = std::move(image_id);
  result.prompts.stage = 1;
  result.prompts.frame = gt.frame();
  if (gt.empty()) {
    result.warnings.push_back("ground truth mask is empty; no stage-1 clicks");
    return result;
  }
  for (const auto& region : label_components(gt, options.connectivity, RegionKind::GT)) {
    if (region.area() < static_cast<std::size_t>(options.policy.min_area)) continue;
    const PixelCoord c = snapped_centroid(region.pixels);
    result.prompts.prompts.push_back(
        {c.x, c.y, Polarity::Positive, 1, RegionKind::GT, region.component_id});
  }
  if (result.prompts.prompts.empty()) {
    result.warnings.push_back("every ground truth component is below the minimum area");
  }
  return result;
}

PromptGeneration stage2_prompts(const BinaryMask& pred, const BinaryMask& gt,
                                const PromptOptions& options, std::string image_id) {
  options.policy.validate();
  const ErrorDecomposition dec = decompose_errors(pred, gt);
  PromptGeneration result;
  result.prompts.image_id = std::move(image_id);
  result.prompts.stage = 2;
  result.prompts.frame = gt.frame();
  for (auto kind : {RegionKind::TP, RegionKind::FN, RegionKind::FP}) {
    append_region_clicks(result.prompts.prompts, regions_of(dec, kind, options.connectivity), 2,
                         options);
  }
  if (gt.empty()) result.warnings.push_back("ground truth mask is empty");
  return result;
}

void validate_prompts(const PromptSet& ps) {
  if (ps.image_id.find_first_of("\t\n\r") != std::string::npos) {
    throw FormatError("image id must not contain tabs or line breaks");
  }
  if (ps.stage != 1 && ps.stage != 2) throw FormatError("stage must be 1 or 2");
  if (ps.frame.width < 1 || ps.frame.height < 1) throw FormatError("frame must be positive");
  std::set<std::pair<int, int>> seen;
  for (const auto& p : ps.prompts) {
    if (p.x < 0 || p.y < 0 || p.x >= ps.frame.width || p.y >= ps.frame.height) {
      throw FormatError("click (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                        ") lies outside the frame");
    }
    if (p.polarity != polarity_for(p.region_kind)) {
      throw FormatError("polarity contradicts region kind " + std::string(to_string(p.region_kind)));
    }
    if (p.stage != ps.stage) throw FormatError("click stage differs from prompt set stage");
    if (!seen.insert({p.x, p.y}).second) {
      throw FormatError("duplicate click position (" + std::to_string(p.x) + "," +
                        std::to_string(p.y) + ")");
    }
  }
}

void write_prompts(std::ostream& out, const PromptSet& ps) {
  validate_prompts(ps);
  out << kPromptMagic << '\t' << kPromptFormatVersion << '\t' << ps.image_id << '\t' << ps.stage
      << '\t' << ps.frame.width << 'x' << ps.frame.height << '\n';
  for (const auto& p : ps.prompts) {
    out << p.x << '\t' << p.y << '\t' << (p.polarity == Polarity::Positive ? "+1" : "-1") << '\t'
        << to_string(p.region_kind) << '\t' << p.component_id << '\n';
  }
}

std::string format_prompts(const PromptSet& ps) {
  std::ostringstream out;
  write_prompts(out, ps);
  return out.str();
}

void serialize_prompts(const PromptSet& ps, const std::filesystem::path& path) {
  const std::string text = format_prompts(ps);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

PromptSet parse_prompts(std::istream& in) {
  PromptSet ps;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  const auto header = split_tabs(line);
  if (header.size() != 5 || header[0] != kPromptMagic) {
    throw ParseError(line_no, "expected header 'CLICKPROMPTS<TAB>version<TAB>image_id<TAB>stage<TAB>WxH'");
  }
  int version = 0;
  if (!parse_int(header[1], version) || version != kPromptFormatVersion) {
    throw ParseError(line_no, "unsupported format version '" + std::string(header[1]) + "'");
  }
  ps.image_id = std::string(header[2]);
  if (!parse_int(header[3], ps.stage) || (ps.stage != 1 && ps.stage != 2)) {
    throw ParseError(line_no, "stage must be 1 or 2");
  }
  if (!parse_frame(header[4], ps.frame)) throw ParseError(line_no, "malformed frame '" + std::string(header[4]) + "'");

  std::set<std::pair<int, int>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split_tabs(line);
    if (f.size() != 5) {
      throw ParseError(line_no, "expected 5 tab-separated fields, got " + std::to_string(f.size()));
    }
    ClickPrompt p;
    p.stage = ps.stage;
    if (!parse_int(f[0], p.x) || !parse_int(f[1], p.y)) throw ParseError(line_no, "malformed coordinate");
    if (f[2] == "+1") {
      p.polarity = Polarity::Positive;
    } else if (f[2] == "-1") {
      p.polarity = Polarity::Negative;
    } else {
      throw ParseError(line_no, "polarity must be +1 or -1");
    }
    if (!parse_region_kind(f[3], p.region_kind)) {
      throw ParseError(line_no, "unknown region kind '" + std::string(f[3]) + "'");
    }
    if (!parse_int(f[4], p.component_id) || p.component_id < 0) {
      throw ParseError(line_no, "malformed component id");
    }
    if (p.polarity != polarity_for(p.region_kind)) {
      throw ParseError(line_no, "polarity contradicts region kind " + std::string(f[3]));
    }
    if (p.x < 0 || p.y < 0 || p.x >= ps.frame.width || p.y >= ps.frame.height) {
      throw ParseError(line_no, "click lies outside the " + std::to_string(ps.frame.width) + "x" +
                                    std::to_string(ps.frame.height) + " header frame");
    }
    if (!seen.insert({p.x, p.y}).second) throw ParseError(line_no, "duplicate click position");
    ps.prompts.push_back(p);
  }
  return ps;
}

PromptSet parse_prompts_string(const std::string& text) {
  std::istringstream in(text);
  return parse_prompts(in);
}

PromptSet parse_prompts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_prompts(in);
}

}  // namespace clickseg
