#include "regionharvest/dataset.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "regionharvest/error.hpp"
#include "regionharvest/rng.hpp"

namespace fs = std::filesystem;

namespace rh {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Reads the next whitespace-delimited PNM header token, skipping comments.
bool next_pnm_token(std::istream& in, std::string& token) {
  token.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return true;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return !token.empty();
}

int parse_header_int(std::istream& in, const fs::path& path) {
  std::string token;
  if (!next_pnm_token(in, token)) fail(ErrorCode::UnreadableImage, "truncated PGM header: " + path.string());
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v < 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::UnreadableImage, "bad PGM header value '" + token + "': " + path.string());
  }
}

std::uint8_t rescale(int v, int maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  std::string magic;
  if (!next_pnm_token(in, magic) || (magic != "P2" && magic != "P5"))
    fail(ErrorCode::UnreadableImage, "not a P2/P5 PGM: " + path.string());
  const int width = parse_header_int(in, path);
  const int height = parse_header_int(in, path);
  const int maxval = parse_header_int(in, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    fail(ErrorCode::UnreadableImage, "invalid PGM dimensions or maxval: " + path.string());

  GrayImage image(height, width);
  const std::size_t count = image.pixels.size();
  if (magic == "P2") {
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
      if (!next_pnm_token(in, token)) fail(ErrorCode::UnreadableImage, "truncated PGM data: " + path.string());
      int v = 0;
      try {
        v = std::stoi(token);
      } catch (const std::exception&) {
        fail(ErrorCode::UnreadableImage, "bad PGM sample '" + token + "': " + path.string());
      }
      if (v < 0 || v > maxval) fail(ErrorCode::UnreadableImage, "PGM sample out of range: " + path.string());
      image.pixels[i] = rescale(v, maxval);
    }
  } else {
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      fail(ErrorCode::UnreadableImage, "truncated PGM data: " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
      const int v = bytes_per == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
      if (v > maxval) fail(ErrorCode::UnreadableImage, "PGM sample out of range: " + path.string());
      image.pixels[i] = rescale(v, maxval);
    }
  }
  return image;
}

GrayImage read_png(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str()))
    fail(ErrorCode::UnreadableImage, "cannot decode PNG " + path.string() + ": " + png.message);
  png.format = PNG_FORMAT_GRAY;
  GrayImage image(static_cast<int>(png.height), static_cast<int>(png.width));
  // Composite any alpha onto white so transparent regions read as background.
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&png, &white, image.pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    fail(ErrorCode::UnreadableImage, "cannot decode PNG " + path.string() + ": " + msg);
  }
  return image;
}

GrayImage read_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  unsigned char magic[8] = {};
  in.read(reinterpret_cast<char*>(magic), sizeof magic);
  const auto got = static_cast<std::size_t>(in.gcount());
  in.close();
  if (got >= 2 && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path);
  if (got == 8 && png_sig_cmp(magic, 0, 8) == 0) return read_png(path);
  fail(ErrorCode::UnreadableImage, "unsupported image format: " + path.string());
}

void write_pgm(const fs::path& path, const GrayImage& image, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n";
  for (const auto& c : comments) out << "# " << c << "\n";
  out << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

Manifest load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::MissingFile, "cannot open manifest " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();

  Manifest manifest;
  std::unordered_map<std::string, int> dense;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      fail(ErrorCode::MalformedManifest, "manifest row " + std::to_string(line_no) + ": expected image_path,label");
    const std::string path_field = trim(line.substr(0, comma));
    const std::string label_field = trim(line.substr(comma + 1));
    if (manifest.samples.empty() && dense.empty() && path_field == "image_path" && label_field == "label") continue;
    if (path_field.empty() || label_field.empty())
      fail(ErrorCode::MalformedManifest, "manifest row " + std::to_string(line_no) + ": empty field");

    fs::path image_path = path_field;
    if (image_path.is_relative()) image_path = base / image_path;
    if (!fs::exists(image_path))
      fail(ErrorCode::MissingFile,
           "manifest row " + std::to_string(line_no) + ": missing file '" + image_path.string() + "'");

    RawSample sample;
    try {
      sample.image = read_image(image_path);
    } catch (const Error& e) {
      fail(ErrorCode::UnreadableImage, "manifest row " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = dense.try_emplace(label_field, static_cast<int>(manifest.label_names.size()));
    if (inserted) manifest.label_names.push_back(label_field);
    sample.label = it->second;
    sample.source_id = path_field;
    manifest.samples.push_back(std::move(sample));
  }
  if (manifest.samples.empty()) fail(ErrorCode::EmptyManifest, "manifest has no rows: " + manifest_path.string());
  return manifest;
}

BinarizeResult binarize(const GrayImage& gray) {
  std::array<std::uint64_t, 256> hist{};
  for (const auto v : gray.pixels) ++hist[v];
  const auto levels = std::count_if(hist.begin(), hist.end(), [](std::uint64_t n) { return n > 0; });

  BinarizeResult result;
  result.image = BinaryImage(gray.height, gray.width);
  if (levels <= 1) {
    const int level = gray.pixels.front();
    result.uniform = true;
    result.threshold = level < 128 ? level : -1;
  } else {
    const double total = static_cast<double>(gray.pixels.size());
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * static_cast<double>(hist[v]);

    // Between-class variance w0 * w1 * (mu0 - mu1)^2 for foreground {<= t}.
    double best = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 255; ++t) {
      w0 += static_cast<double>(hist[t]);
      sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
      const double w1 = total - w0;
      if (w0 == 0.0 || w1 == 0.0) continue;
      const double mu0 = sum0 / w0;
      const double mu1 = (sum_all - sum0) / w1;
      const double between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
      if (between > best) {
        best = between;
        result.threshold = t;
      }
    }
  }
  for (int r = 0; r < gray.height; ++r)
    for (int c = 0; c < gray.width; ++c) result.image.set(r, c, gray.at(r, c) <= result.threshold);
  return result;
}

BinaryImage normalize(const BinaryImage& image, int target_h, int target_w) {
  if (target_h < 4 || target_w < 4) fail(ErrorCode::InvalidArgument, "normalize target must be at least 4x4");
  int top = image.height(), bottom = -1, left = image.width(), right = -1;
  for (int r = 0; r < image.height(); ++r)
    for (int c = 0; c < image.width(); ++c)
      if (image.at(r, c)) {
        top = std::min(top, r);
        bottom = std::max(bottom, r);
        left = std::min(left, c);
        right = std::max(right, c);
      }
  if (bottom < 0) fail(ErrorCode::Precondition, "cannot normalize an image with no foreground");

  const int src_h = bottom - top + 1;
  const int src_w = right - left + 1;
  // Source index range [first, last) feeding output index i along one axis.
  const auto cell = [](int i, int src, int dst) {
    const auto lo = static_cast<int>(static_cast<long long>(i) * src / dst);
    const auto hi = static_cast<int>(static_cast<long long>(i + 1) * src / dst);
    return std::pair{lo, std::max(hi, lo + 1)};
  };

  BinaryImage out(target_h, target_w);
  for (int r = 0; r < target_h; ++r) {
    const auto [r0, r1] = cell(r, src_h, target_h);
    for (int c = 0; c < target_w; ++c) {
      const auto [c0, c1] = cell(c, src_w, target_w);
      bool on = false;
      for (int sr = r0; sr < r1 && !on; ++sr)
        for (int sc = c0; sc < c1 && !on; ++sc) on = image.at(top + sr, left + sc) != 0;
      out.set(r, c, on);
    }
  }
  return out;
}

PreparedSamples prepare_samples(const std::vector<RawSample>& raw, int target_h, int target_w) {
  PreparedSamples prepared;
  prepared.samples.reserve(raw.size());
  for (const auto& s : raw) {
    auto bin = binarize(s.image);
    if (bin.uniform) ++prepared.uniform_warnings;
    if (bin.image.foreground_count() == 0) {
      ++prepared.rejected_empty;
      continue;
    }
    prepared.samples.push_back({normalize(bin.image, target_h, target_w), s.label, s.source_id});
  }
  return prepared;
}

DatasetSplit split(const std::vector<Sample>& samples, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train <= 0.0 || ratios.validation <= 0.0 || ratios.test <= 0.0)
    fail(ErrorCode::InvalidArgument, "split ratios must be positive");
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "split ratios must sum to 1");

  std::set<std::string> ids;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label < 0) fail(ErrorCode::InvalidArgument, "negative label");
    if (!ids.insert(samples[i].source_id).second)
      fail(ErrorCode::InvalidArgument, "duplicate source_id '" + samples[i].source_id + "'");
    by_class[samples[i].label].push_back(i);
  }
  if (by_class.empty()) fail(ErrorCode::InvalidArgument, "no samples to split");

  DatasetSplit out;
  out.class_count = by_class.rbegin()->first + 1;
  for (int k = 0; k < out.class_count; ++k) {
    const auto it = by_class.find(k);
    const std::size_t n = it == by_class.end() ? 0 : it->second.size();
    if (n < 3)
      fail(ErrorCode::Precondition, "class " + std::to_string(k) + " has " + std::to_string(n) + " samples; need >= 3");
  }

  Rng rng(seed);
  for (auto& [label, indices] : by_class) {
    rng.shuffle(std::span<std::size_t>(indices));
    const std::size_t n = indices.size();
    auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.validation + 0.5));
    auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.test + 0.5));
    while (n_val + n_test >= n) {
      if (n_test >= n_val && n_test > 0)
        --n_test;
      else
        --n_val;
    }
    const std::size_t n_train = n - n_val - n_test;
    for (std::size_t i = 0; i < n; ++i) {
      const Sample& s = samples[indices[i]];
      if (i < n_train)
        out.train.push_back(s);
      else if (i < n_train + n_val)
        out.validation.push_back(s);
      else
        out.test.push_back(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic templates
// ---------------------------------------------------------------------------

namespace {

enum Stroke : std::uint32_t {
  kTopBar = 1u << 0,
  kMidBar = 1u << 1,
  kBottomBar = 1u << 2,
  kLeftBar = 1u << 3,
  kCenterBar = 1u << 4,
  kRightBar = 1u << 5,
  kDiagonal = 1u << 6,
  kAntiDiagonal = 1u << 7,
  kRing = 1u << 8,
  kTopLeftRing = 1u << 9,
  kBottomRightRing = 1u << 10,
};

constexpr std::array<std::uint32_t, kMaxSyntheticClasses> kTemplates = {
    kCenterBar,
    kMidBar,
    kDiagonal,
    kAntiDiagonal,
    kRing,
    kMidBar | kCenterBar,
    kDiagonal | kAntiDiagonal,
    kTopBar | kLeftBar | kBottomBar,
    kTopBar | kBottomBar | kLeftBar | kRightBar,
    kLeftBar | kRightBar | kMidBar,
    kTopBar | kCenterBar,
    kLeftBar | kBottomBar,
    kTopBar | kAntiDiagonal | kBottomBar,
    kLeftBar | kDiagonal | kRightBar,
    kRing | kCenterBar,
    kRing | kMidBar,
    kTopBar | kMidBar | kBottomBar,
    kLeftBar | kCenterBar | kRightBar,
    kLeftBar | kTopBar | kMidBar,
    kRightBar | kBottomBar | kMidBar,
    kTopLeftRing | kRightBar,
    kBottomRightRing | kTopBar,
    kDiagonal | kMidBar,
    kAntiDiagonal | kCenterBar,
    kTopBar | kRightBar | kDiagonal,
    kRing | kDiagonal,
};

void paint_ring(BinaryImage& img, double cr, double cc, double radius) {
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) {
      const double d = std::hypot(r - cr, c - cc);
      if (d >= radius - 1.5 && d <= radius + 1.5) img.set(r, c, true);
    }
}

}  // namespace

BinaryImage synthetic_template(int label) {
  if (label < 0 || label >= kMaxSyntheticClasses) fail(ErrorCode::InvalidArgument, "template label out of range");
  constexpr int n = kSyntheticSize;
  constexpr int lo = 3, hi = n - 4;
  BinaryImage img(n, n);
  const std::uint32_t strokes = kTemplates[static_cast<std::size_t>(label)];
  const auto hbar = [&](int row) {
    for (int r = row - 1; r <= row + 1; ++r)
      for (int c = lo; c <= hi; ++c) img.set(r, c, true);
  };
  const auto vbar = [&](int col) {
    for (int r = lo; r <= hi; ++r)
      for (int c = col - 1; c <= col + 1; ++c) img.set(r, c, true);
  };
  if (strokes & kTopBar) hbar(lo + 1);
  if (strokes & kMidBar) hbar(n / 2);
  if (strokes & kBottomBar) hbar(hi - 1);
  if (strokes & kLeftBar) vbar(lo + 1);
  if (strokes & kCenterBar) vbar(n / 2);
  if (strokes & kRightBar) vbar(hi - 1);
  for (int i = lo; i <= hi; ++i)
    for (int d = -1; d <= 1; ++d) {
      const int j = std::clamp(i + d, lo, hi);
      if (strokes & kDiagonal) img.set(i, j, true);
      if (strokes & kAntiDiagonal) img.set(i, n - 1 - j, true);
    }
  if (strokes & kRing) paint_ring(img, (n - 1) / 2.0, (n - 1) / 2.0, 11.0);
  if (strokes & kTopLeftRing) paint_ring(img, 9.0, 9.0, 5.0);
  if (strokes & kBottomRightRing) paint_ring(img, 22.0, 22.0, 5.0);
  return img;
}

std::vector<Sample> generate_synthetic(int class_count, int per_class, double noise, std::uint64_t seed) {
  if (class_count < 2 || class_count > kMaxSyntheticClasses)
    fail(ErrorCode::InvalidArgument, "synthetic class count must be in [2, 26]");
  if (per_class < 1) fail(ErrorCode::InvalidArgument, "synthetic per-class count must be >= 1");
  if (!(noise >= 0.0 && noise <= 0.2)) fail(ErrorCode::InvalidArgument, "synthetic noise must be in [0, 0.2]");

  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(class_count) * per_class);
  for (int k = 0; k < class_count; ++k) {
    const BinaryImage tmpl = synthetic_template(k);
    for (int i = 0; i < per_class; ++i) {
      BinaryImage img = tmpl;
      for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
          if (rng.bernoulli(noise)) img.set(r, c, img.at(r, c) == 0);
      char id[64];
      std::snprintf(id, sizeof id, "synth/c%02d/%05d", k, i);
      samples.push_back({std::move(img), k, id});
    }
  }
  return samples;
}

void write_synthetic_corpus(const fs::path& dir, const std::vector<Sample>& samples) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream manifest(dir / "manifest.csv");
  if (!manifest) fail(ErrorCode::Io, "cannot write " + (dir / "manifest.csv").string());
  manifest << "image_path,label\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "img_%06zu.pgm", i);
    write_pgm(dir / name, to_gray(samples[i].image), {"source_id=" + samples[i].source_id});
    manifest << name << ",c" << samples[i].label << "\n";
  }
  if (!manifest) fail(ErrorCode::Io, "write failed: " + (dir / "manifest.csv").string());
}

}  // namespace rh
