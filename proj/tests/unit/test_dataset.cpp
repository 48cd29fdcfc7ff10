#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "clickseg/dataset.hpp"
#include "clickseg/errors.hpp"
#include "clickseg/image_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace clickseg {
namespace {

using testing::filled_rect;
using testing::TempDir;

void touch_raster(const fs::path& path, int w = 8, int h = 8) {
  fs::create_directories(path.parent_path());
  save_mask(BinaryMask(w, h), path);
}

DatasetManifest synthetic_manifest(std::size_t benign, std::size_t malignant) {
  DatasetManifest m;
  m.root = "/data";
  auto add = [&](ClassLabel label, std::size_t n) {
    for (std::size_t i = 1; i <= n; ++i) {
      DatasetEntry e;
      e.class_label = label;
      e.image_id = std::string(to_string(label)) + " (" + std::to_string(i) + ")";
      e.image_path = std::string(to_string(label)) + "/" + e.image_id + ".png";
      e.mask_paths = {std::string(to_string(label)) + "/" + e.image_id + "_mask.png"};
      m.entries.push_back(e);
    }
  };
  add(ClassLabel::Benign, benign);
  add(ClassLabel::Malignant, malignant);
  return m;
}

std::map<std::string, Split> assignment(const DatasetManifest& m) {
  std::map<std::string, Split> out;
  for (const auto& e : m.entries) out[e.image_id] = e.split;
  return out;
}

TEST(ScanDataset, BusiLayout) {
  TempDir dir;
  touch_raster(dir / "benign/benign (1).png");
  touch_raster(dir / "benign/benign (1)_mask.png");
  touch_raster(dir / "benign/benign (2).png");
  touch_raster(dir / "benign/benign (2)_mask.png");
  touch_raster(dir / "benign/benign (2)_mask_1.png");
  touch_raster(dir / "malignant/malignant (1).png");
  touch_raster(dir / "malignant/malignant (1)_mask.png");
  touch_raster(dir / "normal/normal (1).png");
  touch_raster(dir / "normal/normal (1)_mask.png");

  const ScanResult r = scan_dataset(dir.path());
  ASSERT_EQ(r.manifest.entries.size(), 3u);
  EXPECT_TRUE(r.warnings.empty());
  const auto& e = r.manifest.entries;
  EXPECT_EQ(e[0].image_id, "benign (1)");
  EXPECT_EQ(e[0].image_path, "benign/benign (1).png");
  EXPECT_EQ(e[0].mask_paths, (std::vector<std::string>{"benign/benign (1)_mask.png"}));
  EXPECT_EQ(e[1].mask_paths,
            (std::vector<std::string>{"benign/benign (2)_mask.png", "benign/benign (2)_mask_1.png"}));
  EXPECT_EQ(e[2].class_label, ClassLabel::Malignant);
  for (const auto& entry : e) EXPECT_EQ(entry.split, Split::Unassigned);

  const ScanResult with_normal = scan_dataset(dir.path(), {.include_normal = true});
  ASSERT_EQ(with_normal.manifest.entries.size(), 4u);
  EXPECT_EQ(with_normal.manifest.entries[3].class_label, ClassLabel::Normal);
}

TEST(ScanDataset, ClassFromFilenamePrefixInFlatFolder) {
  TempDir dir;
  touch_raster(dir / "benign_7.pgm");
  touch_raster(dir / "benign_7_mask.pgm");
  touch_raster(dir / "Malignant 3.png");
  touch_raster(dir / "Malignant 3_mask.png");
  const ScanResult r = scan_dataset(dir.path());
  ASSERT_EQ(r.manifest.entries.size(), 2u);
  EXPECT_EQ(r.manifest.entries[0].image_id, "Malignant 3");
  EXPECT_EQ(r.manifest.entries[0].class_label, ClassLabel::Malignant);
  EXPECT_EQ(r.manifest.entries[1].class_label, ClassLabel::Benign);
}

TEST(ScanDataset, ExclusionsWarn) {
  TempDir dir;
  touch_raster(dir / "benign/benign (1).png");  // no mask
  touch_raster(dir / "misc/scan 4.png");
  touch_raster(dir / "misc/scan 4_mask.png");  // no class
  touch_raster(dir / "benign/benign (2).png");
  touch_raster(dir / "benign/benign (2)_mask.png");
  {
    std::ofstream f(dir / "benign/notes.txt");
    f << "ignored";
  }
  const ScanResult r = scan_dataset(dir.path());
  ASSERT_EQ(r.manifest.entries.size(), 1u);
  EXPECT_EQ(r.manifest.entries[0].image_id, "benign (2)");
  ASSERT_EQ(r.warnings.size(), 2u);
}

TEST(ScanDataset, EmptyAndMissingRoots) {
  TempDir dir;
  const ScanResult r = scan_dataset(dir.path());
  EXPECT_TRUE(r.manifest.entries.empty());
  EXPECT_THROW(scan_dataset(dir / "nope"), IoError);
}

TEST(ScanDataset, DuplicateIdsAcrossFolders) {
  TempDir dir;
  touch_raster(dir / "benign/benign (1).png");
  touch_raster(dir / "benign/benign (1)_mask.png");
  touch_raster(dir / "copy/benign/benign (1).png");
  touch_raster(dir / "copy/benign/benign (1)_mask.png");
  EXPECT_THROW(scan_dataset(dir.path()), FormatError);
}

TEST(MergeMasks, UnionOfInstances) {
  TempDir dir;
  const BinaryMask a = filled_rect(10, 10, 0, 0, 3, 3);
  const BinaryMask b = filled_rect(10, 10, 5, 5, 2, 2);
  save_mask(a, dir / "a.png");
  save_mask(b, dir / "b.png");
  EXPECT_EQ(merge_masks({dir / "a.png"}), a);
  EXPECT_EQ(merge_masks({dir / "a.png", dir / "b.png"}), mask_or(a, b));
  EXPECT_EQ(merge_masks({dir / "a.png", dir / "a.png"}), a);
}

TEST(MergeMasks, Errors) {
  TempDir dir;
  save_mask(BinaryMask(10, 10), dir / "a.png");
  save_mask(BinaryMask(10, 9), dir / "b.png");
  EXPECT_THROW(merge_masks({dir / "a.png", dir / "b.png"}), FormatError);
  EXPECT_THROW(merge_masks({}), DomainError);
  EXPECT_THROW(merge_masks({dir / "missing.png"}), IoError);
}

TEST(LoadGroundTruth, ResizesToFrame) {
  TempDir dir;
  save_mask(filled_rect(4, 4, 0, 0, 2, 2), dir / "m.png");
  DatasetManifest m;
  m.root = dir.path().string();
  DatasetEntry e;
  e.image_id = "x";
  e.mask_paths = {"m.png"};
  const BinaryMask gt = load_ground_truth(m, e, Frame{8, 8});
  EXPECT_EQ(gt, filled_rect(8, 8, 0, 0, 4, 4));
}

TEST(TrainCount, Examples) {
  EXPECT_EQ(train_count(647, 0.8), 517u);
  EXPECT_EQ(train_count(5, 0.8), 4u);
  EXPECT_EQ(train_count(10, 0.8), 8u);
  EXPECT_EQ(train_count(780, 0.8), 624u);
  EXPECT_EQ(train_count(1, 0.8), 0u);
  EXPECT_EQ(train_count(0, 0.8), 0u);
}

TEST(TrainCount, MatchesExactRationalFloor) {
  for (std::size_t n = 0; n < 2000; ++n) EXPECT_EQ(train_count(n, 0.8), 4 * n / 5) << n;
}

TEST(SplitDataset, BusiCounts) {
  const DatasetManifest m = split_dataset(synthetic_manifest(437, 210), 0.8, 42);
  EXPECT_EQ(m.count(Split::Train), 517u);
  EXPECT_EQ(m.count(Split::Test), 130u);
  EXPECT_EQ(m.seed, 42u);
}

TEST(SplitDataset, FiveEntries) {
  const DatasetManifest m = split_dataset(synthetic_manifest(3, 2), 0.8, 1);
  EXPECT_EQ(m.count(Split::Train), 4u);
  EXPECT_EQ(m.count(Split::Test), 1u);
}

TEST(SplitDataset, DeterministicAndOrderIndependent) {
  const DatasetManifest base = synthetic_manifest(40, 25);
  const auto a = assignment(split_dataset(base, 0.8, 9));
  EXPECT_EQ(a, assignment(split_dataset(base, 0.8, 9)));

  DatasetManifest reversed = base;
  std::reverse(reversed.entries.begin(), reversed.entries.end());
  EXPECT_EQ(a, assignment(split_dataset(reversed, 0.8, 9)));

  Rng rng(3);
  DatasetManifest shuffled = base;
  for (std::size_t i = shuffled.entries.size(); i > 1; --i) {
    std::swap(shuffled.entries[i - 1], shuffled.entries[rng.below(i)]);
  }
  EXPECT_EQ(a, assignment(split_dataset(shuffled, 0.8, 9)));

  EXPECT_NE(a, assignment(split_dataset(base, 0.8, 10)));
}

TEST(SplitDataset, StratifiedKeepsTotalsAndProportions) {
  const DatasetManifest m = split_dataset(synthetic_manifest(437, 210), 0.8, 5, true);
  EXPECT_EQ(m.count(Split::Train), 517u);
  std::size_t benign_train = 0, malignant_train = 0;
  for (const auto& e : m.entries) {
    if (e.split != Split::Train) continue;
    (e.class_label == ClassLabel::Benign ? benign_train : malignant_train)++;
  }
  // 517 * 437 / 647 = 349.19..., 517 * 210 / 647 = 167.80...
  EXPECT_EQ(benign_train, 349u);
  EXPECT_EQ(malignant_train, 168u);
}

TEST(SplitDataset, Errors) {
  const DatasetManifest base = synthetic_manifest(4, 4);
  EXPECT_THROW(split_dataset(base, 0.0, 1), DomainError);
  EXPECT_THROW(split_dataset(base, 1.0, 1), DomainError);
  EXPECT_THROW(split_dataset(base, std::nan(""), 1), DomainError);
  const DatasetManifest assigned = split_dataset(base, 0.5, 1);
  EXPECT_THROW(split_dataset(assigned, 0.5, 2), DomainError);
  const DatasetManifest cleared = clear_split(assigned);
  EXPECT_EQ(cleared.count(Split::Unassigned), 8u);
  EXPECT_FALSE(cleared.seed);
  EXPECT_NO_THROW(split_dataset(cleared, 0.5, 2));
}

TEST(Manifest, RoundTrip) {
  DatasetManifest m = split_dataset(synthetic_manifest(6, 3), 0.8, 77);
  m.entries[1].mask_paths.push_back("benign/benign (2)_mask_1.png");
  std::stringstream s;
  write_manifest(s, m);
  EXPECT_EQ(read_manifest(s), m);

  DatasetManifest unsplit = synthetic_manifest(2, 1);
  std::stringstream t;
  write_manifest(t, unsplit);
  EXPECT_NE(t.str().find("seed\t-\n"), std::string::npos);
  EXPECT_EQ(read_manifest(t), unsplit);
}

TEST(Manifest, ExactText) {
  DatasetManifest m;
  m.root = "/data/busi";
  m.seed = 3;
  m.entries.push_back({"benign (1)", ClassLabel::Benign, "benign/benign (1).png",
                       {"benign/benign (1)_mask.png"}, Split::Test});
  std::ostringstream s;
  write_manifest(s, m);
  EXPECT_EQ(s.str(),
            "CLICKMANIFEST\t1\nroot\t/data/busi\nseed\t3\n"
            "benign (1)\tbenign\ttest\tbenign/benign (1).png\tbenign/benign (1)_mask.png\n");
}

TEST(Manifest, SaveAndLoadFile) {
  TempDir dir;
  const DatasetManifest m = synthetic_manifest(2, 2);
  save_manifest(m, dir / "m.tsv");
  EXPECT_EQ(load_manifest(dir / "m.tsv"), m);
  EXPECT_THROW(load_manifest(dir / "absent.tsv"), IoError);
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_manifest(in);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

TEST(Manifest, ParseErrorsCarryLineNumbers) {
  const std::string head = "CLICKMANIFEST\t1\nroot\t/r\nseed\t-\n";
  EXPECT_EQ(parse_error_line(""), 1);
  EXPECT_EQ(parse_error_line("CLICKMANIFEST\t2\n"), 1);
  EXPECT_EQ(parse_error_line("CLICKMANIFEST\t1\n"), 2);
  EXPECT_EQ(parse_error_line("CLICKMANIFEST\t1\nroot\t/r\nseed\tabc\n"), 3);
  EXPECT_EQ(parse_error_line(head + "a\tbenign\ttrain\ta.png\n"), 4);
  EXPECT_EQ(parse_error_line(head + "a\tbenign\ttrain\ta.png\tm.png\nb\tcat\ttrain\tb.png\tm.png\n"), 5);
  EXPECT_EQ(parse_error_line(head + "a\tbenign\tval\ta.png\tm.png\n"), 4);
  EXPECT_EQ(parse_error_line(head + "a\tbenign\ttrain\ta.png\tm.png\n"), -1);
}

TEST(Manifest, DuplicateIdRejected) {
  std::istringstream in(
      "CLICKMANIFEST\t1\nroot\t/r\nseed\t-\n"
      "a\tbenign\ttrain\ta.png\tm.png\na\tbenign\ttest\ta.png\tm.png\n");
  EXPECT_THROW(read_manifest(in), FormatError);
}

TEST(Manifest, RejectsTabsInFields) {
  DatasetManifest m = synthetic_manifest(1, 0);
  m.entries[0].image_id = "bad\tid";
  std::ostringstream s;
  EXPECT_THROW(write_manifest(s, m), FormatError);
}

}  // namespace
}  // namespace clickseg
