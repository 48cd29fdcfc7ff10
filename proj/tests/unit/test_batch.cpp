#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "clickseg/batch.hpp"
#include "clickseg/errors.hpp"
#include "clickseg/image_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace clickseg {
namespace {

using testing::filled_rect;
using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Three benign images with square lesions at 64x64.
DatasetManifest make_dataset(const TempDir& dir) {
  for (int i = 1; i <= 3; ++i) {
    const std::string stem = "benign/benign (" + std::to_string(i) + ")";
    fs::create_directories(dir / "data/benign");
    save_mask(BinaryMask(64, 64), dir / ("data/" + stem + ".png"));
    save_mask(filled_rect(64, 64, 8 * i, 10, 12, 9 + i), dir / ("data/" + stem + "_mask.png"));
  }
  return scan_dataset(dir / "data").manifest;
}

BatchOptions options_for(const TempDir& dir, const std::string& out) {
  BatchOptions o;
  o.out_dir = dir / out;
  o.predictions_dir = dir / "pred";
  o.frame = {64, 64};
  return o;
}

void write_predictions_from_gt(const TempDir& dir, const DatasetManifest& m) {
  fs::create_directories(dir / "pred");
  for (const auto& e : m.entries) {
    save_mask(load_ground_truth(m, e, {64, 64}), dir / ("pred/" + e.image_id + ".png"));
  }
}

TEST(RunBatch, Stage1WritesOnePromptFilePerImage) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  BatchOptions o = options_for(dir, "s1");
  o.overlay = true;
  const BatchSummary s = run_batch(m, BatchMode::Stage1, o);
  EXPECT_EQ(s.ok, 3u);
  EXPECT_EQ(s.failed, 0u);
  EXPECT_EQ(s.clicks, 3u);
  EXPECT_EQ(s.summary_line(), "3 ok, 0 failed, 3 clicks");
  for (const auto& e : m.entries) {
    const PromptSet p = parse_prompts(dir / ("s1/" + e.image_id + ".prompts"));
    EXPECT_EQ(p.stage, 1);
    ASSERT_EQ(p.prompts.size(), 1u);
    EXPECT_EQ(p.prompts[0].region_kind, RegionKind::GT);
    EXPECT_TRUE(fs::exists(dir / ("s1/" + e.image_id + ".overlay.png")));
  }
  EXPECT_EQ(slurp(dir / "s1/summary.txt"), "3 ok, 0 failed, 3 clicks\n");
}

TEST(RunBatch, EvalOfPerfectPredictions) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  write_predictions_from_gt(dir, m);
  const BatchSummary s = run_batch(m, BatchMode::Eval, options_for(dir, "ev"));
  ASSERT_TRUE(s.mean);
  EXPECT_DOUBLE_EQ(s.mean->mask_iou, 1.0);
  EXPECT_DOUBLE_EQ(s.mean->bbox_iou, 1.0);
  EXPECT_DOUBLE_EQ(s.mean->dice, 1.0);
  const std::string csv = slurp(dir / "ev/report.csv");
  EXPECT_NE(csv.find("MEAN,1.000000000,1.000000000,1.000000000,3 ok 0 failed"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "ev/report.txt"));
}

TEST(RunBatch, Stage2MissingPredictionFailsOnlyThatImage) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  write_predictions_from_gt(dir, m);
  fs::remove(dir / ("pred/" + m.entries[1].image_id + ".png"));
  const BatchSummary s = run_batch(m, BatchMode::Stage2, options_for(dir, "s2"));
  EXPECT_EQ(s.ok, 2u);
  EXPECT_EQ(s.failed, 1u);
  EXPECT_FALSE(s.images[1].ok);
  EXPECT_NE(s.images[1].error.find("missing prediction"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / ("s2/" + m.entries[1].image_id + ".prompts")));
  const PromptSet p = parse_prompts(dir / ("s2/" + m.entries[0].image_id + ".prompts"));
  EXPECT_EQ(p.stage, 2);
  for (const auto& c : p.prompts) EXPECT_EQ(c.region_kind, RegionKind::TP);
}

TEST(RunBatch, PredictionOutsideFrameIsPerImageError) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  write_predictions_from_gt(dir, m);
  save_mask(BinaryMask(32, 32), dir / ("pred/" + m.entries[0].image_id + ".png"));
  const BatchSummary s = run_batch(m, BatchMode::Eval, options_for(dir, "ev"));
  EXPECT_EQ(s.failed, 1u);
  EXPECT_NE(s.images[0].error.find("target frame"), std::string::npos);
  ASSERT_TRUE(s.mean);
  EXPECT_DOUBLE_EQ(s.mean->mask_iou, 1.0);
}

TEST(RunBatch, SubsetSelectsSplit) {
  TempDir dir;
  DatasetManifest m = make_dataset(dir);
  m = split_dataset(m, 0.5, 3);
  BatchOptions o = options_for(dir, "s1");
  o.subset = Split::Test;
  const BatchSummary s = run_batch(m, BatchMode::Stage1, o);
  EXPECT_EQ(s.images.size(), m.count(Split::Test));
}

TEST(RunBatch, OutputIndependentOfJobs) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  write_predictions_from_gt(dir, m);
  BatchOptions one = options_for(dir, "j1");
  BatchOptions many = options_for(dir, "j4");
  many.jobs = 4;
  run_batch(m, BatchMode::Stage1, one);
  run_batch(m, BatchMode::Stage1, many);
  for (const auto& e : m.entries) {
    EXPECT_EQ(slurp(dir / ("j1/" + e.image_id + ".prompts")), slurp(dir / ("j4/" + e.image_id + ".prompts")));
  }
}

TEST(RunBatch, Stage2RequiresPredictionsDir) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  BatchOptions o = options_for(dir, "x");
  o.predictions_dir.clear();
  EXPECT_THROW(run_batch(m, BatchMode::Stage2, o), DomainError);
}

TEST(Summary, BboxHeadline) {
  BatchSummary s;
  s.mode = BatchMode::Eval;
  s.ok = 1;
  s.mean = MetricReport{"MEAN", 0.5, 0.75, 0.6};
  EXPECT_EQ(s.summary_line(), "1 ok, 0 failed, mean mask IoU 0.500000, mean bbox IoU 0.750000, mean Dice 0.600000");
  s.bbox_headline = true;
  EXPECT_EQ(s.summary_line(), "1 ok, 0 failed, mean bbox IoU 0.750000, mean mask IoU 0.500000, mean Dice 0.600000");
}

int run_cli(const std::string& args, const TempDir& dir) {
  const std::string cmd = std::string("\"") + CLICKSEG_CLI + "\" " + args + " > \"" +
                          (dir / "cli.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

TEST(Cli, EndToEnd) {
  TempDir dir;
  const DatasetManifest m = make_dataset(dir);
  write_predictions_from_gt(dir, m);
  const std::string frame = "--frame 64x64 ";

  ASSERT_EQ(run_cli("scan " + q(dir / "data") + " -o " + q(dir / "m.tsv"), dir), 0);
  EXPECT_EQ(load_manifest(dir / "m.tsv"), m);
  ASSERT_EQ(run_cli("--seed 4 split " + q(dir / "m.tsv") + " -o " + q(dir / "s.tsv"), dir), 0);
  EXPECT_EQ(load_manifest(dir / "s.tsv").count(Split::Train), 2u);
  EXPECT_EQ(run_cli("--seed 4 split " + q(dir / "s.tsv") + " -o " + q(dir / "t.tsv"), dir), 2);
  EXPECT_EQ(run_cli("--seed 4 split --reassign " + q(dir / "s.tsv") + " -o " + q(dir / "t.tsv"), dir), 0);

  ASSERT_EQ(run_cli(frame + "stage1 " + q(dir / "s.tsv") + " -o " + q(dir / "o1"), dir), 0);
  EXPECT_EQ(slurp(dir / "o1/summary.txt"), "3 ok, 0 failed, 3 clicks\n");
  ASSERT_EQ(run_cli(frame + "eval " + q(dir / "s.tsv") + " -o " + q(dir / "ev") + " -p " + q(dir / "pred"), dir), 0);
  EXPECT_NE(slurp(dir / "cli.log").find("mean mask IoU 1.000000"), std::string::npos);

  fs::remove(dir / ("pred/" + m.entries[2].image_id + ".png"));
  EXPECT_EQ(run_cli(frame + "stage2 " + q(dir / "s.tsv") + " -o " + q(dir / "o2") + " -p " + q(dir / "pred"), dir), 1);
  EXPECT_NE(slurp(dir / "cli.log").find("2 ok, 1 failed"), std::string::npos);

  EXPECT_EQ(run_cli("stage2 " + q(dir / "s.tsv") + " -o " + q(dir / "o3"), dir), 106);  // CLI11 usage error
  EXPECT_EQ(run_cli("--connectivity 6 stage1 " + q(dir / "s.tsv") + " -o " + q(dir / "o3"), dir), 105);
  EXPECT_EQ(run_cli("stage1 " + q(dir / "absent.tsv") + " -o " + q(dir / "o3"), dir), 2);
}

TEST(Cli, CvtDebugPrintsClicks) {
  TempDir dir;
  save_mask(filled_rect(64, 64, 0, 0, 10, 1), dir / "row.png");
  ASSERT_EQ(run_cli("--frame 64x64 cvt-debug " + q(dir / "row.png") + " -k 2 -o " + q(dir / "o.png"), dir), 0);
  const std::string log = slurp(dir / "cli.log");
  EXPECT_NE(log.find("0\t10\t2\t"), std::string::npos);
  EXPECT_NE(log.find("  2\t0\n  7\t0\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "o.png"));
}

}  // namespace
}  // namespace clickseg
