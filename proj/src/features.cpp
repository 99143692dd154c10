#include "regionharvest/features.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "regionharvest/error.hpp"

namespace rh {

int longest_run(std::span<const std::uint8_t> line) {
  int best = 0, run = 0;
  for (const auto v : line) {
    run = v ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

namespace {

// Longest run along the line starting at (r, c) stepping (1, dc) while inside.
int run_along(const BinaryImage& image, const Region& region, int r, int c, int dc) {
  int best = 0, run = 0;
  for (; r <= region.bottom && c >= region.left && c <= region.right; ++r, c += dc) {
    run = image.at(r, c) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace

double directional_feature(const BinaryImage& image, const Region& region, Direction direction) {
  if (region.empty()) return 0.0;
  long total = 0;
  switch (direction) {
    case Direction::Row:
      for (int r = region.top; r <= region.bottom; ++r)
        total += longest_run(image.row(r).subspan(static_cast<std::size_t>(region.left),
                                                  static_cast<std::size_t>(region.width())));
      break;
    case Direction::Col:
      for (int c = region.left; c <= region.right; ++c) {
        int best = 0, run = 0;
        for (int r = region.top; r <= region.bottom; ++r) {
          run = image.at(r, c) ? run + 1 : 0;
          best = std::max(best, run);
        }
        total += best;
      }
      break;
    case Direction::Diag1:
      for (int c = region.left; c <= region.right; ++c) total += run_along(image, region, region.top, c, +1);
      for (int r = region.top + 1; r <= region.bottom; ++r) total += run_along(image, region, r, region.left, +1);
      break;
    case Direction::Diag2:
      for (int c = region.left; c <= region.right; ++c) total += run_along(image, region, region.top, c, -1);
      for (int r = region.top + 1; r <= region.bottom; ++r) total += run_along(image, region, r, region.right, -1);
      break;
  }
  return static_cast<double>(total) / static_cast<double>(region.area());
}

RegionFeatures region_features(const BinaryImage& image, const Region& region) {
  return {directional_feature(image, region, Direction::Row), directional_feature(image, region, Direction::Col),
          directional_feature(image, region, Direction::Diag1), directional_feature(image, region, Direction::Diag2)};
}

SampleFeatures extract_features(const BinaryImage& image, const RegionTree& tree) {
  SampleFeatures out;
  const auto regions = tree.all();
  for (std::size_t i = 0; i < regions.size(); ++i) out[i] = region_features(image, regions[i]);
  return out;
}

SampleFeatures extract_features(const BinaryImage& image) { return extract_features(image, build_tree(image)); }

FeatureVector assemble(const SampleFeatures& features, const RegionSubset& selected) {
  FeatureVector v;
  v.reserve(feature_length(selected));
  const auto push = [&](const RegionFeatures& f) {
    v.push_back(f.row);
    v.push_back(f.col);
    v.push_back(f.diag1);
    v.push_back(f.diag2);
  };
  for (int i = 0; i < 1 + kLevel1Count; ++i) push(features[static_cast<std::size_t>(i)]);
  for (const int i : selected.indices()) push(features[static_cast<std::size_t>(1 + kLevel1Count + i)]);
  return v;
}

FeatureVector assemble(const BinaryImage& image, const RegionTree& tree, const RegionSubset& selected) {
  return assemble(extract_features(image, tree), selected);
}

void write_feature_store(std::ostream& out, const std::vector<FeatureRecord>& records,
                         const std::vector<std::string>& preamble) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << "sample_id,label";
  for (int i = 0; i < kFullFeatureCount; ++i) out << ",f" << i;
  out << '\n';
  char buf[32];
  for (const auto& rec : records) {
    if (rec.sample_id.find(',') != std::string::npos)
      fail(ErrorCode::InvalidArgument, "sample_id may not contain ',': " + rec.sample_id);
    out << rec.sample_id << ',' << rec.label;
    const FeatureVector v = assemble(rec.features, RegionSubset::all());
    for (const double x : v) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "feature store write failed");
}

std::vector<FeatureRecord> read_feature_store(std::istream& in) {
  std::vector<FeatureRecord> records;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line.rfind("sample_id,label,f0,", 0) != 0)
        fail(ErrorCode::MalformedManifest, "feature store: missing header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 2 + kFullFeatureCount)
      fail(ErrorCode::MalformedManifest, "feature store line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(2 + kFullFeatureCount) + " columns");
    FeatureRecord rec;
    rec.sample_id = fields[0];
    rec.label = std::stoi(fields[1]);
    std::array<double, kFullFeatureCount> values{};
    for (int i = 0; i < kFullFeatureCount; ++i) {
      const std::string& f = fields[static_cast<std::size_t>(2 + i)];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[static_cast<std::size_t>(i)]);
      if (ec != std::errc() || ptr != f.data() + f.size())
        fail(ErrorCode::MalformedManifest, "feature store line " + std::to_string(line_no) + ": bad value '" + f + "'");
    }
    for (std::size_t r = 0; r < rec.features.size(); ++r)
      rec.features[r] = {values[4 * r], values[4 * r + 1], values[4 * r + 2], values[4 * r + 3]};
    records.push_back(std::move(rec));
  }
  if (!header_seen) fail(ErrorCode::MalformedManifest, "feature store: missing header");
  return records;
}

}  // namespace rh
