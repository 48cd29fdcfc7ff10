#include "clickseg/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "clickseg/errors.hpp"
#include "clickseg/overlay.hpp"

namespace fs = std::filesystem;

namespace clickseg {
namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

BinaryMask load_prediction(const BatchOptions& options, const std::string& image_id) {
  const fs::path path = options.predictions_dir / (image_id + ".png");
  if (!fs::exists(path)) throw IoError("missing prediction " + path.string());
  BinaryMask pred = load_mask(path, options.threshold);
  if (pred.frame() != options.frame) {
    throw FormatError("prediction " + path.string() + " is " + std::to_string(pred.width()) + "x" +
                      std::to_string(pred.height()) + ", expected the " +
                      std::to_string(options.frame.width) + "x" +
                      std::to_string(options.frame.height) + " target frame");
  }
  return pred;
}

ImageOutcome process_one(const DatasetManifest& manifest, const DatasetEntry& entry,
                         BatchMode mode, const BatchOptions& options) {
  ImageOutcome outcome;
  outcome.image_id = entry.image_id;
  try {
    const BinaryMask gt = load_ground_truth(manifest, entry, options.frame, options.threshold);
    if (mode == BatchMode::Eval) {
      const BinaryMask pred = load_prediction(options, entry.image_id);
      outcome.metrics = evaluate(pred, gt, entry.image_id);
    } else {
      PromptGeneration gen;
      std::optional<BinaryMask> pred;
      if (mode == BatchMode::Stage1) {
        gen = stage1_prompts(gt, options.prompt, entry.image_id);
      } else {
        pred = load_prediction(options, entry.image_id);
        gen = stage2_prompts(*pred, gt, options.prompt, entry.image_id);
      }
      serialize_prompts(gen.prompts, options.out_dir / (entry.image_id + ".prompts"));
      if (options.overlay) {
        RgbImage image = pred ? render_decomposition(decompose_errors(*pred, gt)) : render_mask(gt);
        draw_clicks(image, gen.prompts.prompts);
        write_rgb_png(image, options.out_dir / (entry.image_id + ".overlay.png"));
      }
      outcome.clicks = gen.prompts.prompts.size();
      outcome.warnings = std::move(gen.warnings);
    }
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

std::string BatchSummary::summary_line() const {
  std::string line = std::to_string(ok) + " ok, " + std::to_string(failed) + " failed";
  if (mode == BatchMode::Eval) {
    if (mean) {
      if (bbox_headline) {
        line += ", mean bbox IoU " + fixed(mean->bbox_iou) + ", mean mask IoU " + fixed(mean->mask_iou);
      } else {
        line += ", mean mask IoU " + fixed(mean->mask_iou) + ", mean bbox IoU " + fixed(mean->bbox_iou);
      }
      line += ", mean Dice " + fixed(mean->dice);
    }
  } else {
    line += ", " + std::to_string(clicks) + " clicks";
  }
  return line;
}

BatchSummary run_batch(const DatasetManifest& manifest, BatchMode mode,
                       const BatchOptions& options) {
  if (mode != BatchMode::Stage1 && options.predictions_dir.empty()) {
    throw DomainError("stage2 and eval need a predictions directory");
  }
  options.prompt.policy.validate();
  fs::create_directories(options.out_dir);

  std::vector<const DatasetEntry*> selected;
  for (const auto& e : manifest.entries) {
    if (!options.subset || e.split == *options.subset) selected.push_back(&e);
  }

  BatchSummary summary;
  summary.mode = mode;
  summary.bbox_headline = options.bbox_headline;
  summary.images.resize(selected.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      summary.images[i] = process_one(manifest, *selected[i], mode, options);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(selected.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  MetricReport sum{"MEAN"};
  std::size_t evaluated = 0;
  for (const auto& img : summary.images) {
    if (img.ok) {
      ++summary.ok;
    } else {
      ++summary.failed;
    }
    summary.clicks += img.clicks;
    if (img.metrics) {
      sum.mask_iou += img.metrics->mask_iou;
      sum.bbox_iou += img.metrics->bbox_iou;
      sum.dice += img.metrics->dice;
      ++evaluated;
    }
  }
  if (mode == BatchMode::Eval && evaluated > 0) {
    const double n = static_cast<double>(evaluated);
    summary.mean = MetricReport{"MEAN", sum.mask_iou / n, sum.bbox_iou / n, sum.dice / n};
  }

  if (mode == BatchMode::Eval) {
    write_text(options.out_dir / "report.txt", format_report_table(summary));
    write_text(options.out_dir / "report.csv", format_report_csv(summary));
  }
  std::ostringstream text;
  for (const auto& img : summary.images) {
    if (!img.ok) text << "FAILED\t" << img.image_id << '\t' << img.error << '\n';
    for (const auto& w : img.warnings) text << "WARNING\t" << img.image_id << '\t' << w << '\n';
  }
  text << summary.summary_line() << '\n';
  write_text(options.out_dir / "summary.txt", text.str());
  return summary;
}

std::string format_report_table(const BatchSummary& summary) {
  std::size_t id_width = 8;
  for (const auto& img : summary.images) id_width = std::max(id_width, img.image_id.size());
  auto pad = [&](const std::string& s) { return s + std::string(id_width - s.size() + 2, ' '); };

  std::ostringstream out;
  out << pad("image_id") << "mask_iou  bbox_iou  dice      status\n";
  for (const auto& img : summary.images) {
    out << pad(img.image_id);
    if (img.metrics) {
      out << fixed(img.metrics->mask_iou) << "  " << fixed(img.metrics->bbox_iou) << "  "
          << fixed(img.metrics->dice) << "  ok\n";
    } else {
      out << "-         -         -         failed: " << img.error << '\n';
    }
  }
  if (summary.mean) {
    out << pad("MEAN") << fixed(summary.mean->mask_iou) << "  " << fixed(summary.mean->bbox_iou)
        << "  " << fixed(summary.mean->dice) << "  " << summary.ok << " ok, " << summary.failed
        << " failed\n";
  }
  return out.str();
}

std::string format_report_csv(const BatchSummary& summary) {
  std::ostringstream out;
  out << "image_id,mask_iou,bbox_iou,dice,status\n";
  for (const auto& img : summary.images) {
    out << csv_field(img.image_id) << ',';
    if (img.metrics) {
      out << fixed(img.metrics->mask_iou, 9) << ',' << fixed(img.metrics->bbox_iou, 9) << ','
          << fixed(img.metrics->dice, 9) << ",ok\n";
    } else {
      out << ",,,failed\n";
    }
  }
  if (summary.mean) {
    out << "MEAN," << fixed(summary.mean->mask_iou, 9) << ',' << fixed(summary.mean->bbox_iou, 9)
        << ',' << fixed(summary.mean->dice, 9) << ',' << summary.ok << " ok " << summary.failed
        << " failed\n";
  }
  return out.str();
}

}  // namespace clickseg
