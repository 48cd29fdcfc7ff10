#include "clickseg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "clickseg/errors.hpp"
#include "clickseg/rng.hpp"

namespace fs = std::filesystem;

namespace clickseg {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_raster(const fs::path& p) {
  const std::string ext = lower(p.extension().string());
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::optional<ClassLabel> class_from_name(const std::string& name) {
  const std::string l = lower(name);
  for (auto label : {ClassLabel::Benign, ClassLabel::Malignant, ClassLabel::Normal}) {
    if (l.rfind(to_string(label), 0) == 0) return label;
  }
  return std::nullopt;
}

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

void shuffle(std::vector<std::size_t>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

}  // namespace

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::Benign: return "benign";
    case ClassLabel::Malignant: return "malignant";
    case ClassLabel::Normal: return "normal";
  }
  return "?";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Unassigned: return "unassigned";
    case Split::Train: return "train";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<ClassLabel> parse_class_label(std::string_view text) {
  for (auto label : {ClassLabel::Benign, ClassLabel::Malignant, ClassLabel::Normal}) {
    if (text == to_string(label)) return label;
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
  for (auto split : {Split::Unassigned, Split::Train, Split::Test}) {
    if (text == to_string(split)) return split;
  }
  return std::nullopt;
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [split](const auto& e) { return e.split == split; }));
}

ScanResult scan_dataset(const fs::path& root, const ScanOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory: " + root.string());

  static const std::regex kMaskStem(R"((.*)_mask(_[0-9]+)?)");
  std::vector<fs::path> images;
  std::map<std::pair<fs::path, std::string>, std::vector<fs::path>> masks;

  fs::recursive_directory_iterator it(root, ec);
  if (ec) throw IoError("cannot read directory " + root.string() + ": " + ec.message());
  for (const auto& de : it) {
    if (!de.is_regular_file() || !is_raster(de.path())) continue;
    const std::string stem = de.path().stem().string();
    std::smatch m;
    if (std::regex_match(stem, m, kMaskStem)) {
      masks[{de.path().parent_path(), m[1].str()}].push_back(de.path());
    } else {
      images.push_back(de.path());
    }
  }
  std::sort(images.begin(), images.end());

  ScanResult result;
  result.manifest.root = root.string();
  for (const auto& image : images) {
    const std::string id = image.stem().string();
    auto label = class_from_name(image.parent_path().filename().string());
    if (!label) label = class_from_name(id);
    if (!label) {
      result.warnings.push_back("skipping '" + id + "': cannot determine class");
      continue;
    }
    if (*label == ClassLabel::Normal && !options.include_normal) continue;

    auto found = masks.find({image.parent_path(), id});
    if (found == masks.end() || found->second.empty()) {
      result.warnings.push_back("skipping '" + id + "': no mask files");
      continue;
    }
    DatasetEntry entry;
    entry.image_id = id;
    entry.class_label = *label;
    entry.image_path = image.lexically_relative(root).generic_string();
    auto mask_files = found->second;
    std::sort(mask_files.begin(), mask_files.end());
    for (const auto& m : mask_files) entry.mask_paths.push_back(m.lexically_relative(root).generic_string());
    result.manifest.entries.push_back(std::move(entry));
  }

  auto& entries = result.manifest.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const auto& a, const auto& b) { return a.image_id == b.image_id; });
  if (dup != entries.end()) throw FormatError("duplicate image id '" + dup->image_id + "'");
  return result;
}

BinaryMask merge_masks(const std::vector<fs::path>& mask_paths, int threshold) {
  if (mask_paths.empty()) throw DomainError("merge_masks: no mask paths");
  BinaryMask merged = load_mask(mask_paths.front(), threshold);
  for (std::size_t i = 1; i < mask_paths.size(); ++i) {
    const BinaryMask next = load_mask(mask_paths[i], threshold);
    if (next.frame() != merged.frame()) {
      throw FormatError("mask " + mask_paths[i].string() + " is " + std::to_string(next.width()) +
                        "x" + std::to_string(next.height()) + ", expected " +
                        std::to_string(merged.width()) + "x" + std::to_string(merged.height()));
    }
    merged = mask_or(merged, next);
  }
  return merged;
}

BinaryMask load_ground_truth(const DatasetManifest& manifest, const DatasetEntry& entry,
                             Frame frame, int threshold) {
  std::vector<fs::path> paths;
  for (const auto& m : entry.mask_paths) paths.push_back(manifest.resolve(m));
  return resize_mask(merge_masks(paths, threshold), frame);
}

std::size_t train_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction, std::uint64_t seed,
                              bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must lie in (0, 1)");
  }
  for (const auto& e : manifest.entries) {
    if (e.split != Split::Unassigned) {
      throw DomainError("split_dataset: entry '" + e.image_id + "' is already assigned");
    }
  }

  // Order by image id so the result never depends on how entries were listed.
  std::vector<std::size_t> order(manifest.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return manifest.entries[a].image_id < manifest.entries[b].image_id;
  });

  Rng rng(seed);
  const std::size_t n_train = train_count(order.size(), train_fraction);
  if (!stratified) {
    shuffle(order, rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
      manifest.entries[order[i]].split = i < n_train ? Split::Train : Split::Test;
    }
  } else {
    std::map<ClassLabel, std::vector<std::size_t>> groups;
    for (auto i : order) groups[manifest.entries[i].class_label].push_back(i);

    // Largest-remainder apportionment of n_train across classes.
    struct Share {
      ClassLabel label;
      std::size_t base;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, members] : groups) {
      const double exact = static_cast<double>(n_train) * static_cast<double>(members.size()) /
                           static_cast<double>(order.size());
      const auto base = static_cast<std::size_t>(std::floor(exact));
      shares.push_back({label, base, exact - static_cast<double>(base)});
      assigned += base;
    }
    std::vector<std::size_t> by_remainder(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) by_remainder[i] = i;
    std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
      return shares[a].remainder > shares[b].remainder;
    });
    for (std::size_t i = 0; assigned < n_train && i < by_remainder.size(); ++i, ++assigned) {
      ++shares[by_remainder[i]].base;
    }
    for (const auto& share : shares) {
      auto members = groups[share.label];
      shuffle(members, rng);
      for (std::size_t i = 0; i < members.size(); ++i) {
        manifest.entries[members[i]].split = i < share.base ? Split::Train : Split::Test;
      }
    }
  }
  manifest.seed = seed;
  return manifest;
}

DatasetManifest clear_split(DatasetManifest manifest) {
  for (auto& e : manifest.entries) e.split = Split::Unassigned;
  manifest.seed.reset();
  return manifest;
}

void write_manifest(std::ostream& out, const DatasetManifest& manifest) {
  auto check = [](const std::string& field) {
    if (field.find_first_of("\t\n\r") != std::string::npos) {
      throw FormatError("manifest field contains a tab or line break: '" + field + "'");
    }
  };
  check(manifest.root);
  out << kManifestMagic << '\t' << kManifestFormatVersion << '\n';
  out << "root\t" << manifest.root << '\n';
  out << "seed\t";
  if (manifest.seed) {
    out << *manifest.seed;
  } else {
    out << '-';
  }
  out << '\n';
  for (const auto& e : manifest.entries) {
    check(e.image_id);
    check(e.image_path);
    if (e.mask_paths.empty()) throw FormatError("entry '" + e.image_id + "' has no masks");
    out << e.image_id << '\t' << to_string(e.class_label) << '\t' << to_string(e.split) << '\t'
        << e.image_path;
    for (const auto& m : e.mask_paths) {
      check(m);
      out << '\t' << m;
    }
    out << '\n';
  }
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  std::ostringstream text;
  write_manifest(text, manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << text.str();
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

DatasetManifest read_manifest(std::istream& in) {
  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, std::string("missing ") + what);
    ++line_no;
  };

  next_line("header");
  if (line != std::string(kManifestMagic) + "\t" + std::to_string(kManifestFormatVersion)) {
    throw ParseError(line_no, "expected 'CLICKMANIFEST<TAB>1'");
  }
  next_line("root line");
  if (line.rfind("root\t", 0) != 0) throw ParseError(line_no, "expected 'root<TAB>path'");
  manifest.root = line.substr(5);
  next_line("seed line");
  if (line.rfind("seed\t", 0) != 0) throw ParseError(line_no, "expected 'seed<TAB>value'");
  const std::string seed = line.substr(5);
  if (seed != "-") {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), value);
    if (ec != std::errc{} || ptr != seed.data() + seed.size()) throw ParseError(line_no, "malformed seed");
    manifest.seed = value;
  }

  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split_tabs(line);
    if (f.size() < 5) throw ParseError(line_no, "entry needs id, class, split, image and >= 1 mask");
    DatasetEntry e;
    e.image_id = std::string(f[0]);
    const auto label = parse_class_label(f[1]);
    if (!label) throw ParseError(line_no, "unknown class '" + std::string(f[1]) + "'");
    const auto split = parse_split(f[2]);
    if (!split) throw ParseError(line_no, "unknown split '" + std::string(f[2]) + "'");
    e.class_label = *label;
    e.split = *split;
    e.image_path = std::string(f[3]);
    for (std::size_t i = 4; i < f.size(); ++i) e.mask_paths.emplace_back(f[i]);
    manifest.entries.push_back(std::move(e));
  }

  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) ids.push_back(e.image_id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw FormatError("duplicate image id '" + *dup + "' in manifest");
  }
  return manifest;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_manifest(in);
}

}  // namespace clickseg
