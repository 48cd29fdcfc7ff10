// clickseg: click-prompt generation and evaluation over BUSI-style datasets.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "clickseg/batch.hpp"
#include "clickseg/components.hpp"
#include "clickseg/cvt.hpp"
#include "clickseg/dataset.hpp"
#include "clickseg/errors.hpp"
#include "clickseg/overlay.hpp"
#include "clickseg/synthetic.hpp"

namespace fs = std::filesystem;
using namespace clickseg;

namespace {

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string frame = "256x256";
  int connectivity = 8;
  int min_area = 10;
  int area_per_click = 400;
  int max_clicks = 10;
  int threshold = 127;
  bool bbox_iou = false;
  bool overlay = false;
  unsigned jobs = 1;
};

Frame parse_frame_flag(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_w = 0, used_h = 0;
    const std::string w = text.substr(0, x), h = text.substr(x + 1);
    Frame f{std::stoi(w, &used_w), std::stoi(h, &used_h)};
    if (used_w != w.size() || used_h != h.size() || f.width < 1 || f.height < 1) {
      throw std::invalid_argument(text);
    }
    return f;
  } catch (const std::exception&) {
    throw DomainError("--frame expects WxH with positive integers, got '" + text + "'");
  }
}

PromptOptions prompt_options(const GlobalFlags& g) {
  PromptOptions o;
  o.policy = {g.min_area, g.area_per_click, g.max_clicks};
  o.policy.validate();
  o.connectivity = connectivity_from_int(g.connectivity);
  return o;
}

std::optional<Split> parse_subset(const std::string& text) {
  if (text == "all") return std::nullopt;
  if (auto s = parse_split(text); s && *s != Split::Unassigned) return s;
  throw DomainError("--subset must be all, train or test");
}

int run_batch_command(const GlobalFlags& g, BatchMode mode, const std::string& manifest_path,
                      const std::string& out_dir, const std::string& predictions,
                      const std::string& subset) {
  BatchOptions options;
  options.out_dir = out_dir;
  options.predictions_dir = predictions;
  options.frame = parse_frame_flag(g.frame);
  options.prompt = prompt_options(g);
  options.threshold = g.threshold;
  options.subset = parse_subset(subset);
  options.overlay = g.overlay;
  options.bbox_headline = g.bbox_iou;
  options.jobs = g.jobs;

  const BatchSummary summary = run_batch(load_manifest(manifest_path), mode, options);
  for (const auto& img : summary.images) {
    if (!img.ok) std::cerr << "error: " << img.image_id << ": " << img.error << '\n';
    for (const auto& w : img.warnings) std::cerr << "warning: " << img.image_id << ": " << w << '\n';
  }
  if (mode == BatchMode::Eval) std::cout << format_report_table(summary);
  std::cout << summary.summary_line() << '\n';
  return summary.failed == 0 ? 0 : 1;
}

int cvt_debug(const GlobalFlags& g, const std::string& mask_path, int k,
              const std::string& overlay_path) {
  const Frame frame = parse_frame_flag(g.frame);
  const PromptOptions options = prompt_options(g);
  const BinaryMask mask = resize_mask(load_mask(mask_path, g.threshold), frame);

  std::vector<ClickPrompt> all;
  std::cout << "component\tarea\tclicks\titerations\tconverged\tenergy\n";
  for (const auto& region : label_components(mask, options.connectivity)) {
    const int budget = k > 0 ? std::min<int>(k, static_cast<int>(region.area()))
                             : click_budget(region.area(), options.policy);
    if (budget == 0) continue;
    const CvtState state =
        place_clicks(region, static_cast<std::size_t>(budget), options.max_lloyd_iterations);
    std::cout << region.component_id << '\t' << region.area() << '\t' << state.clicks.size() << '\t'
              << state.iterations << '\t' << (state.converged ? "yes" : "no") << '\t'
              << state.energy << '\n';
    for (const auto& c : state.clicks) {
      std::cout << "  " << c.x << '\t' << c.y << '\n';
      all.push_back({c.x, c.y, Polarity::Positive, 2, RegionKind::TP, region.component_id});
    }
  }
  if (!overlay_path.empty()) {
    RgbImage image = render_mask(mask);
    draw_clicks(image, all);
    write_rgb_png(image, overlay_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Click-prompt generation and segmentation evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Random seed (split, synth)");
  app.add_option("--frame", g.frame, "Target frame WxH")->capture_default_str();
  app.add_option("--connectivity", g.connectivity, "Pixel connectivity (4 or 8)")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  app.add_option("--min-area", g.min_area, "Regions below this area get no clicks")->capture_default_str();
  app.add_option("--area-per-click", g.area_per_click, "Region area per click")->capture_default_str();
  app.add_option("--max-clicks", g.max_clicks, "Click cap per region")->capture_default_str();
  app.add_option("--threshold", g.threshold, "Foreground iff gray > threshold")->capture_default_str();
  app.add_flag("--bbox-iou", g.bbox_iou, "Use bounding-box IoU as the headline metric");
  app.add_flag("--overlay", g.overlay, "Write overlay PNGs");
  app.add_option("--jobs", g.jobs, "Worker threads for batch commands")->capture_default_str();

  std::string root, manifest, out, predictions, subset = "all", mask_path, overlay_path;
  bool include_normal = false, stratified = false, reassign = false;
  double fraction = kDefaultTrainFraction;
  int k = 0;
  SyntheticOptions synth;

  auto* scan = app.add_subcommand("scan", "Build a manifest from a dataset directory");
  scan->add_option("root", root, "Dataset root")->required();
  scan->add_option("-o,--output", out, "Manifest file")->required();
  scan->add_flag("--include-normal", include_normal, "Keep images of the 'normal' class");

  auto* split = app.add_subcommand("split", "Assign train/test splits");
  split->add_option("manifest", manifest, "Input manifest")->required();
  split->add_option("-o,--output", out, "Output manifest")->required();
  split->add_option("--fraction", fraction, "Train fraction")->capture_default_str();
  split->add_flag("--stratified", stratified, "Split each class separately");
  split->add_flag("--reassign", reassign, "Discard an existing split first");

  auto add_batch = [&](const char* name, const char* help, bool needs_predictions) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("manifest", manifest, "Manifest file")->required();
    cmd->add_option("-o,--output", out, "Output directory")->required();
    auto* p = cmd->add_option("-p,--predictions", predictions, "Directory of <image_id>.png predictions");
    if (needs_predictions) p->required();
    cmd->add_option("--subset", subset, "all, train or test")->capture_default_str();
    return cmd;
  };
  auto* stage1 = add_batch("stage1", "Centroid click per ground-truth component", false);
  auto* stage2 = add_batch("stage2", "Error-driven positive/negative clicks", true);
  auto* eval = add_batch("eval", "Mask IoU, bbox IoU and Dice per image", true);

  auto* debug = app.add_subcommand("cvt-debug", "Place CVT clicks in each component of a mask");
  debug->add_option("mask", mask_path, "Mask image")->required();
  debug->add_option("-k,--clicks", k, "Clicks per component (default: click budget)");
  debug->add_option("-o,--output", overlay_path, "Overlay PNG");

  auto* gen = app.add_subcommand("synth", "Generate a synthetic BUSI-style corpus");
  gen->add_option("-o,--output", out, "Output directory")->required();
  gen->add_option("--count", synth.count, "Number of images")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan) {
      ScanOptions options;
      options.include_normal = include_normal;
      const ScanResult result = scan_dataset(root, options);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      save_manifest(result.manifest, out);
      std::cout << result.manifest.entries.size() << " entries\n";
    } else if (*split) {
      DatasetManifest m = load_manifest(manifest);
      if (reassign) m = clear_split(std::move(m));
      m = split_dataset(std::move(m), fraction, g.seed, stratified);
      save_manifest(m, out);
      std::cout << m.count(Split::Train) << " train, " << m.count(Split::Test) << " test\n";
    } else if (*stage1) {
      return run_batch_command(g, BatchMode::Stage1, manifest, out, predictions, subset);
    } else if (*stage2) {
      return run_batch_command(g, BatchMode::Stage2, manifest, out, predictions, subset);
    } else if (*eval) {
      return run_batch_command(g, BatchMode::Eval, manifest, out, predictions, subset);
    } else if (*debug) {
      return cvt_debug(g, mask_path, k, overlay_path);
    } else if (*gen) {
      synth.seed = g.seed;
      synth.frame = parse_frame_flag(g.frame);
      const SyntheticCorpus corpus = generate_synthetic_corpus(out, synth);
      std::cout << corpus.images << " images, " << corpus.mask_files << " masks\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
