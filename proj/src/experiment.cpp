#include "regionharvest/experiment.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "regionharvest/error.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace rh {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "config key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value.front() == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

std::string variant_name(const VariantSelection& v) {
  if (v.enhanced && v.basic) return "both";
  return v.enhanced ? "enhanced" : "basic";
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": empty key");
    std::string value = line.substr(eq + 1);
    // Inline comment: '#' or ';' preceded by whitespace.
    for (std::size_t i = 1; i < value.size(); ++i)
      if ((value[i] == '#' || value[i] == ';') && std::isspace(static_cast<unsigned char>(value[i - 1]))) {
        value.resize(i);
        break;
      }
    out[section.empty() ? key : section + "." + key] = trim(value);
  }
  return out;
}

ConfigMap load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

VariantSelection parse_variant(const std::string& name) {
  if (name == "both") return {true, true};
  if (name == "enhanced") return {true, false};
  if (name == "basic") return {false, true};
  fail(ErrorCode::InvalidArgument, "unknown variant '" + name + "' (expected enhanced|basic|both)");
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& values) {
  ExperimentConfig c;
  for (const auto& [key, value] : values) {
    const auto as_int = [&] { return static_cast<int>(parse_int(key, value)); };
    const auto as_double = [&] { return parse_double(key, value); };
    if (key == "dataset.manifest") c.manifest = value;
    else if (key == "dataset.synthetic.classes") c.synthetic_classes = as_int();
    else if (key == "dataset.synthetic.per_class") c.synthetic_per_class = as_int();
    else if (key == "dataset.synthetic.noise") c.synthetic_noise = as_double();
    else if (key == "normalize.height") c.normalize_height = as_int();
    else if (key == "normalize.width") c.normalize_width = as_int();
    else if (key == "split.train") c.ratios.train = as_double();
    else if (key == "split.validation") c.ratios.validation = as_double();
    else if (key == "split.test") c.ratios.test = as_double();
    else if (key == "classifier.kind") c.classifier.kind = parse_classifier_kind(value);
    else if (key == "classifier.epochs") c.classifier.epochs = as_int();
    else if (key == "classifier.lambda") c.classifier.lambda = as_double();
    else if (key == "search.variant") c.variants = parse_variant(value);
    else if (key == "enhanced.hms") c.enhanced.hs.hms = as_int();
    else if (key == "enhanced.hmcr") c.enhanced.hs.hmcr = as_double();
    else if (key == "enhanced.par") c.enhanced.hs.par = as_double();
    else if (key == "enhanced.bw") c.enhanced.hs.bw = as_double();
    else if (key == "enhanced.ni") c.enhanced.hs.ni = as_int();
    else if (key == "enhanced.size_min") c.enhanced.size_min = as_int();
    else if (key == "enhanced.size_max") c.enhanced.size_max = as_int();
    else if (key == "enhanced.max_retries") c.enhanced.max_retries = as_int();
    else if (key == "basic.hms") c.basic.hms = as_int();
    else if (key == "basic.hmcr") c.basic.hmcr = as_double();
    else if (key == "basic.par") c.basic.par = as_double();
    else if (key == "timing.warmup") c.timing.warmup_calls = as_int();
    else if (key == "timing.calls") c.timing.timed_calls = as_int();
    else if (key == "timing.repeats") c.timing.repeats = as_int();
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "out") c.out_dir = value;
    else fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
  c.enhanced.hs.seed = c.seed;
  c.basic.seed = c.seed;
  validate(c.enhanced);
  validate(c.basic);
  if (c.timing.timed_calls < 1000 || c.timing.warmup_calls < 100 || c.timing.repeats < 1)
    fail(ErrorCode::InvalidArgument, "timing needs calls >= 1000, warmup >= 100 and repeats >= 1");
  return c;
}

ConfigMap ExperimentConfig::to_map() const {
  ConfigMap m;
  m["dataset.manifest"] = manifest;
  m["dataset.synthetic.classes"] = std::to_string(synthetic_classes);
  m["dataset.synthetic.per_class"] = std::to_string(synthetic_per_class);
  m["dataset.synthetic.noise"] = format_double(synthetic_noise);
  m["normalize.height"] = std::to_string(normalize_height);
  m["normalize.width"] = std::to_string(normalize_width);
  m["split.train"] = format_double(ratios.train);
  m["split.validation"] = format_double(ratios.validation);
  m["split.test"] = format_double(ratios.test);
  m["classifier.kind"] = to_string(classifier.kind);
  m["classifier.epochs"] = std::to_string(classifier.epochs);
  m["classifier.lambda"] = format_double(classifier.lambda);
  m["search.variant"] = variant_name(variants);
  m["enhanced.hms"] = std::to_string(enhanced.hs.hms);
  m["enhanced.hmcr"] = format_double(enhanced.hs.hmcr);
  m["enhanced.par"] = format_double(enhanced.hs.par);
  m["enhanced.bw"] = format_double(enhanced.hs.bw);
  m["enhanced.ni"] = std::to_string(enhanced.hs.ni);
  m["enhanced.size_min"] = std::to_string(enhanced.size_min);
  m["enhanced.size_max"] = std::to_string(enhanced.size_max);
  m["enhanced.max_retries"] = std::to_string(enhanced.max_retries);
  m["basic.hms"] = std::to_string(basic.hms);
  m["basic.hmcr"] = format_double(basic.hmcr);
  m["basic.par"] = format_double(basic.par);
  m["timing.warmup"] = std::to_string(timing.warmup_calls);
  m["timing.calls"] = std::to_string(timing.timed_calls);
  m["timing.repeats"] = std::to_string(timing.repeats);
  m["seed"] = std::to_string(seed);
  return m;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [k, v] : config.to_map())
    for (const char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> provenance_lines(const ExperimentConfig& config) {
  std::vector<std::string> lines = {"config_hash=" + config_hash(config), "seed=" + std::to_string(config.seed)};
  for (const auto& [k, v] : config.to_map()) lines.push_back("config " + k + "=" + v);
  return lines;
}

// ---------------------------------------------------------------------------
// Serialisation helpers
// ---------------------------------------------------------------------------

namespace {

json provenance_json(const ExperimentConfig& config) {
  json j;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  json cfg = json::object();
  for (const auto& [k, v] : config.to_map()) cfg[k] = v;
  j["config"] = cfg;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

std::string read_text(const fs::path& path, const std::string& produced_by) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::PhaseOrder, "missing " + path.string() + "; run '" + produced_by + "' first");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json subset_json(const RegionSubset& s) { return s.indices(); }

RegionSubset subset_from(const json& j) { return RegionSubset::from_indices(j.get<std::vector<int>>()); }

json params_json(const RegionSearchParams& p) {
  return {{"hms", p.hs.hms},         {"hmcr", p.hs.hmcr},         {"par", p.hs.par},
          {"bw", p.hs.bw},           {"ni", p.hs.ni},             {"size_min", p.size_min},
          {"size_max", p.size_max},  {"max_retries", p.max_retries}};
}

RegionSearchParams params_from(const json& j, std::uint64_t seed) {
  RegionSearchParams p;
  p.hs.hms = j.at("hms").get<int>();
  p.hs.hmcr = j.at("hmcr").get<double>();
  p.hs.par = j.at("par").get<double>();
  p.hs.bw = j.at("bw").get<double>();
  p.hs.ni = j.at("ni").get<int>();
  p.hs.seed = seed;
  p.size_min = j.at("size_min").get<int>();
  p.size_max = j.at("size_max").get<int>();
  p.max_retries = j.at("max_retries").get<int>();
  return p;
}

json selection_json(const SelectionResult& r) {
  json j;
  j["variant"] = to_string(r.variant);
  j["seed"] = r.seed;
  j["params"] = params_json(r.params);
  j["best_subset"] = subset_json(r.best_subset);
  j["best_fitness"] = r.best_fitness;
  j["region_reduction_pct"] = format_percent(region_reduction(r.best_subset));
  if (r.variant == SearchVariant::Enhanced) {
    json sizes = json::array();
    for (const auto& s : r.per_size)
      sizes.push_back({{"size", s.size},
                       {"subset", subset_json(s.subset)},
                       {"fitness", s.fitness},
                       {"trajectory", s.trajectory}});
    j["per_size"] = sizes;
    j["roulette"] = {{"weights", r.wheel.weights}, {"uniform_fallback", r.wheel.uniform_fallback}};
  } else {
    j["trajectory"] = r.trajectory;
  }
  j["evaluations"] = r.evaluations;
  j["cache_hits"] = r.cache_hits;
  j["requests"] = r.requests;
  j["timing"] = {{"wall_clock_seconds", r.wall_clock_seconds}};
  return j;
}

SelectionResult selection_from(const json& j) {
  SelectionResult r;
  const std::string variant = j.at("variant").get<std::string>();
  if (variant != "enhanced" && variant != "basic") fail(ErrorCode::InvalidArgument, "unknown variant " + variant);
  r.variant = variant == "enhanced" ? SearchVariant::Enhanced : SearchVariant::Basic;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.params = params_from(j.at("params"), r.seed);
  r.best_subset = subset_from(j.at("best_subset"));
  r.best_fitness = j.at("best_fitness").get<double>();
  if (r.variant == SearchVariant::Enhanced) {
    for (const auto& s : j.at("per_size"))
      r.per_size.push_back({s.at("size").get<int>(), subset_from(s.at("subset")), s.at("fitness").get<double>(),
                            s.at("trajectory").get<std::vector<double>>()});
    r.wheel = make_wheel(j.at("roulette").at("weights").get<std::array<double, kLocalRegionCount>>());
    r.wheel.uniform_fallback = j.at("roulette").at("uniform_fallback").get<bool>();
  } else {
    r.trajectory = j.at("trajectory").get<std::vector<double>>();
    r.wheel = make_wheel({});
  }
  r.evaluations = j.at("evaluations").get<std::size_t>();
  r.cache_hits = j.at("cache_hits").get<std::size_t>();
  r.requests = j.at("requests").get<std::size_t>();
  if (j.contains("timing")) r.wall_clock_seconds = j["timing"].value("wall_clock_seconds", 0.0);
  return r;
}

template <typename F>
auto parse_json_or_fail(const std::string& text, const std::string& what, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, "malformed " + what + ": " + e.what());
  }
}

void strip_timing_in_place(json& j) {
  if (j.is_object()) {
    j.erase("timing");
    j.erase("wall_clock_seconds");
    for (auto& [k, v] : j.items()) strip_timing_in_place(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing_in_place(v);
  }
}

}  // namespace

double region_reduction(const RegionSubset& best) {
  return static_cast<double>(kLocalRegionCount - best.size()) / kLocalRegionCount;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

std::string selection_to_json(const SelectionResult& result, const ExperimentConfig* config) {
  json j = config ? provenance_json(*config) : json::object();
  const json body = selection_json(result);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& text) {
  return parse_json_or_fail(text, "selection result", [](const json& j) { return selection_from(j); });
}

std::string report_to_json(const RunReport& report) {
  json j;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  json cfg = json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = cfg;
  j["dataset"] = report.dataset;
  j["feature_normalization"] = "area";
  j["binarization"] = "otsu; darker class is foreground; 0/255 input maps 0->1, 255->0";
  j["baselines"] = {{"global_only_validation", report.baselines.global_only_validation},
                    {"full_validation", report.baselines.full_validation}};
  j["full_test_accuracy"] = report.full_test_accuracy;
  json variants = json::object();
  const auto put = [&](const char* name, const std::optional<VariantOutcome>& o) {
    if (!o) return;
    variants[name] = {{"selection", selection_json(o->selection)},
                      {"test_accuracy", o->test_accuracy},
                      {"feature_count", o->feature_count},
                      {"region_reduction_pct", format_percent(region_reduction(o->selection.best_subset))}};
  };
  put("enhanced", report.enhanced);
  put("basic", report.basic);
  j["variants"] = variants;
  json timing = json::object();
  timing["full_mean_predict_seconds"] = report.full_mean_predict_seconds;
  if (report.enhanced) timing["enhanced_mean_predict_seconds"] = report.enhanced->mean_predict_seconds;
  if (report.basic) timing["basic_mean_predict_seconds"] = report.basic->mean_predict_seconds;
  json phases = json::object();
  for (const auto& [k, v] : report.phase_seconds) phases[k] = v;
  timing["phase_seconds"] = phases;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  return parse_json_or_fail(text, "report", [](const json& j) {
    RunReport r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) r.config[k] = v.get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.baselines.global_only_validation = j.at("baselines").at("global_only_validation").get<double>();
    r.baselines.full_validation = j.at("baselines").at("full_validation").get<double>();
    r.full_test_accuracy = j.at("full_test_accuracy").get<double>();
    const json timing = j.value("timing", json::object());
    r.full_mean_predict_seconds = timing.value("full_mean_predict_seconds", 0.0);
    const auto get = [&](const char* name) -> std::optional<VariantOutcome> {
      const auto& vs = j.at("variants");
      if (!vs.contains(name)) return std::nullopt;
      const auto& v = vs.at(name);
      VariantOutcome o;
      o.selection = selection_from(v.at("selection"));
      o.test_accuracy = v.at("test_accuracy").get<double>();
      o.feature_count = v.at("feature_count").get<std::size_t>();
      o.mean_predict_seconds = timing.value(std::string(name) + "_mean_predict_seconds", 0.0);
      return o;
    };
    r.enhanced = get("enhanced");
    r.basic = get("basic");
    if (timing.contains("phase_seconds"))
      for (const auto& [k, v] : timing.at("phase_seconds").items()) r.phase_seconds[k] = v.get<double>();
    return r;
  });
}

std::string strip_timing(const std::string& json_text) {
  json j = parse_json_or_fail(json_text, "JSON", [](const json& v) { return v; });
  strip_timing_in_place(j);
  return j.dump(2) + "\n";
}

std::string accuracy_table_csv(const RunReport& report) {
  const auto pct = [](double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", a * 100.0);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "# config_hash=" << report.config_hash << " seed=" << report.seed << "\n";
  out << "dataset,present_work,basic_hs,without_sampling\n";
  out << report.dataset << ',' << (report.enhanced ? pct(report.enhanced->test_accuracy) : "") << ','
      << (report.basic ? pct(report.basic->test_accuracy) : "") << ',' << pct(report.full_test_accuracy) << '\n';
  return out.str();
}

std::string timing_table_csv(const RunReport& report) {
  const auto sec = [](double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", s);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "# config_hash=" << report.config_hash << " seed=" << report.seed << "\n";
  out << "dataset,present_work,basic_hs,without_sampling\n";
  out << report.dataset << ',' << (report.enhanced ? sec(report.enhanced->mean_predict_seconds) : "") << ','
      << (report.basic ? sec(report.basic->mean_predict_seconds) : "") << ','
      << sec(report.full_mean_predict_seconds) << '\n';
  return out.str();
}

std::string render_region_map(const RegionSubset& selected) {
  std::ostringstream out;
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      // Level-2 index = 4 * parent quadrant + child quadrant.
      const int parent = 2 * (row / 2) + col / 2;
      const int child = 2 * (row % 2) + col % 2;
      const int idx = 4 * parent + child;
      char cell[8];
      std::snprintf(cell, sizeof cell, selected.contains(idx) ? "[%2d]" : " %2d ", idx);
      out << (col ? " " : "") << cell;
    }
    out << '\n';
  }
  out << "selected=" << selected.size() << " rejected=" << kLocalRegionCount - selected.size()
      << " reduction=" << format_percent(region_reduction(selected)) << "%\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Phases
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kSplitNames[] = {"train", "validation", "test"};

template <typename F>
auto in_phase(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Internal, std::string(name) + ": " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string dataset_name(const ExperimentConfig& c) {
  if (!c.manifest.empty()) return fs::path(c.manifest).stem().string();
  return "synthetic-" + std::to_string(c.synthetic_classes) + "x" + std::to_string(c.synthetic_per_class);
}

std::string csv_preamble(const ExperimentConfig& c) {
  std::string s;
  for (const auto& line : provenance_lines(c)) s += "# " + line + "\n";
  return s;
}

struct IndexRow {
  std::string path;
  int label = 0;
  std::string split;
};

std::vector<IndexRow> read_index(const ExperimentConfig& c) {
  std::istringstream in(read_text(c.out_dir / "index.csv", "prepare"));
  std::vector<IndexRow> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto a = line.find(',');
    const auto b = line.rfind(',');
    if (a == std::string::npos || a == b) fail(ErrorCode::MalformedManifest, "bad index.csv row: " + line);
    rows.push_back({line.substr(0, a), std::stoi(line.substr(a + 1, b - a - 1)), line.substr(b + 1)});
  }
  return rows;
}

struct LoadedStore {
  std::vector<SampleFeatures> features;
  std::vector<int> labels;
};

LoadedStore load_store(const ExperimentConfig& c, const std::string& split) {
  std::istringstream in(read_text(c.out_dir / "features" / (split + ".csv"), "extract"));
  LoadedStore store;
  for (auto& rec : read_feature_store(in)) {
    store.features.push_back(rec.features);
    store.labels.push_back(rec.label);
  }
  if (store.features.empty()) fail(ErrorCode::PhaseOrder, "feature store for '" + split + "' is empty");
  return store;
}

std::vector<FeatureVector> assemble_all(const std::vector<SampleFeatures>& features, const RegionSubset& subset) {
  std::vector<FeatureVector> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(assemble(f, subset));
  return out;
}

double phase_wall_clock(const json& j) {
  if (!j.contains("timing")) return 0.0;
  return j["timing"].value("wall_clock_seconds", 0.0);
}

}  // namespace

PrepareSummary run_prepare(const ExperimentConfig& c) {
  return in_phase("prepare", [&] {
    const auto start = std::chrono::steady_clock::now();
    std::vector<RawSample> raw;
    std::vector<std::string> label_names;
    if (!c.manifest.empty()) {
      Manifest m = load_manifest(c.manifest);
      raw = std::move(m.samples);
      label_names = std::move(m.label_names);
    } else {
      for (auto& s : generate_synthetic(c.synthetic_classes, c.synthetic_per_class, c.synthetic_noise, c.seed))
        raw.push_back({to_gray(s.image), s.label, s.source_id});
      for (int k = 0; k < c.synthetic_classes; ++k) label_names.push_back("c" + std::to_string(k));
    }
    PrepareSummary summary;
    summary.loaded = raw.size();
    PreparedSamples prepared = prepare_samples(raw, c.normalize_height, c.normalize_width);
    summary.rejected_empty = prepared.rejected_empty;
    if (prepared.rejected_empty > 0)
      std::clog << "prepare: rejected " << prepared.rejected_empty << " sample(s) with empty foreground\n";
    const DatasetSplit parts = split(prepared.samples, c.ratios, c.seed);
    summary.train = parts.train.size();
    summary.validation = parts.validation.size();
    summary.test = parts.test.size();
    summary.class_count = parts.class_count;

    const auto provenance = provenance_lines(c);
    std::ostringstream index;
    index << csv_preamble(c) << "path,label,split\n";
    const std::vector<const std::vector<Sample>*> lists = {&parts.train, &parts.validation, &parts.test};
    for (std::size_t s = 0; s < lists.size(); ++s) {
      const fs::path dir = c.out_dir / "cache" / kSplitNames[s];
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
      for (std::size_t i = 0; i < lists[s]->size(); ++i) {
        const Sample& sample = (*lists[s])[i];
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.pgm", i);
        std::vector<std::string> comments = provenance;
        comments.push_back("source_id=" + sample.source_id);
        write_pgm(dir / name, to_gray(sample.image), comments);
        index << "cache/" << kSplitNames[s] << '/' << name << ',' << sample.label << ',' << kSplitNames[s] << '\n';
      }
    }
    write_text(c.out_dir / "index.csv", index.str());

    json j = provenance_json(c);
    j["dataset"] = dataset_name(c);
    j["loaded"] = summary.loaded;
    j["rejected_empty"] = summary.rejected_empty;
    j["uniform_binarization_warnings"] = prepared.uniform_warnings;
    j["class_count"] = summary.class_count;
    j["label_names"] = label_names;
    j["counts"] = {{"train", summary.train}, {"validation", summary.validation}, {"test", summary.test}};
    j["timing"] = {{"wall_clock_seconds", seconds_since(start)}};
    write_text(c.out_dir / "prepare.json", j.dump(2) + "\n");
    return summary;
  });
}

void run_extract(const ExperimentConfig& c) {
  in_phase("extract", [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto rows = read_index(c);
    std::map<std::string, std::vector<FeatureRecord>> by_split;
    for (const char* s : kSplitNames) by_split[s];
    for (const auto& row : rows) {
      const BinaryImage image = binarize(read_pgm(c.out_dir / row.path)).image;
      if (!by_split.count(row.split)) fail(ErrorCode::MalformedManifest, "unknown split '" + row.split + "'");
      by_split[row.split].push_back({row.path, row.label, extract_features(image)});
    }
    const auto provenance = provenance_lines(c);
    for (const auto& [split_name, records] : by_split) {
      std::ostringstream out;
      write_feature_store(out, records, provenance);
      write_text(c.out_dir / "features" / (split_name + ".csv"), out.str());
    }
    json j = provenance_json(c);
    j["samples"] = rows.size();
    j["timing"] = {{"wall_clock_seconds", seconds_since(start)}};
    write_text(c.out_dir / "extract.json", j.dump(2) + "\n");
  });
}

namespace {

FitnessContext make_context(const ExperimentConfig& c) {
  LoadedStore tr = load_store(c, "train");
  LoadedStore va = load_store(c, "validation");
  FitnessData data{std::move(tr.features), std::move(tr.labels), std::move(va.features), std::move(va.labels)};
  return FitnessContext(std::move(data), c.classifier, c.classifier_seed());
}

}  // namespace

Baselines run_baseline(const ExperimentConfig& c) {
  return in_phase("baseline", [&] {
    const auto start = std::chrono::steady_clock::now();
    FitnessContext ctx = make_context(c);
    Baselines b;
    b.global_only_validation = ctx.fitness(RegionSubset());
    b.full_validation = ctx.fitness(RegionSubset::all());
    json j = provenance_json(c);
    j["global_only_validation"] = b.global_only_validation;
    j["full_validation"] = b.full_validation;
    j["timing"] = {{"wall_clock_seconds", seconds_since(start)}};
    write_text(c.out_dir / "baseline.json", j.dump(2) + "\n");
    return b;
  });
}

std::vector<SelectionResult> run_search(const ExperimentConfig& c) {
  return in_phase("search", [&] {
    FitnessContext ctx = make_context(c);
    std::vector<SelectionResult> results;
    if (c.variants.enhanced) {
      results.push_back(enhanced_search(ctx, c.enhanced));
      write_text(c.out_dir / "results" / "enhanced.json", selection_to_json(results.back(), &c));
    }
    if (c.variants.basic) {
      RegionSearchParams bp = c.enhanced;
      bp.hs.hms = c.basic.hms;
      bp.hs.hmcr = c.basic.hmcr;
      bp.hs.par = c.basic.par;
      const std::size_t budget = enhanced_request_budget(c.enhanced);
      const int improvisations =
          budget > static_cast<std::size_t>(bp.hs.hms) ? static_cast<int>(budget) - bp.hs.hms : 0;
      results.push_back(basic_search(ctx, bp, improvisations));
      write_text(c.out_dir / "results" / "basic.json", selection_to_json(results.back(), &c));
    }
    return results;
  });
}

void run_evaluate(const ExperimentConfig& c) {
  in_phase("evaluate", [&] {
    const auto start = std::chrono::steady_clock::now();
    const LoadedStore tr = load_store(c, "train");
    const LoadedStore te = load_store(c, "test");

    struct Entry {
      std::string name;
      RegionSubset subset;
      TrainedModel model;
      std::vector<FeatureVector> test_vectors;
      double accuracy = 0.0;
      double seconds = std::numeric_limits<double>::infinity();
    };
    std::vector<Entry> entries;
    entries.push_back({"full", RegionSubset::all(), {}, {}});
    for (const char* variant : {"enhanced", "basic"}) {
      const bool wanted = std::string(variant) == "enhanced" ? c.variants.enhanced : c.variants.basic;
      if (!wanted) continue;
      const SelectionResult r =
          selection_from_json(read_text(c.out_dir / "results" / (std::string(variant) + ".json"), "search"));
      entries.push_back({variant, r.best_subset, {}, {}});
    }
    for (auto& e : entries) {
      e.model = train(assemble_all(tr.features, e.subset), tr.labels, c.classifier, c.classifier_seed());
      e.test_vectors = assemble_all(te.features, e.subset);
      e.accuracy = evaluate(e.model, e.test_vectors, te.labels).accuracy;
      json m = provenance_json(c);
      m["subset"] = subset_json(e.subset);
      m["model"] = json::parse(model_to_json(e.model));
      write_text(c.out_dir / "models" / (e.name + ".json"), m.dump(2) + "\n");
    }
    // Interleave the timing rounds across models so drift hits all of them.
    TimingProtocol round = c.timing;
    round.repeats = 1;
    for (int rep = 0; rep < c.timing.repeats; ++rep)
      for (auto& e : entries) e.seconds = std::min(e.seconds, time_predictions(e.model, e.test_vectors, round));

    json j = provenance_json(c);
    json models = json::object();
    json timing = json::object();
    for (const auto& e : entries) {
      models[e.name] = {{"subset", subset_json(e.subset)},
                        {"feature_count", feature_length(e.subset)},
                        {"test_accuracy", e.accuracy}};
      timing[e.name + "_mean_predict_seconds"] = e.seconds;
    }
    j["models"] = models;
    j["timing_protocol"] = {{"warmup_calls", c.timing.warmup_calls},
                            {"timed_calls", c.timing.timed_calls},
                            {"rounds", c.timing.repeats},
                            {"statistic", "min over rounds of the per-call mean"}};
    timing["wall_clock_seconds"] = seconds_since(start);
    j["timing"] = timing;
    write_text(c.out_dir / "evaluation.json", j.dump(2) + "\n");
  });
}

RunReport run_report(const ExperimentConfig& c) {
  return in_phase("report", [&] {
    RunReport r;
    r.config = c.to_map();
    r.config_hash = config_hash(c);
    r.seed = c.seed;
    r.dataset = dataset_name(c);

    const json prepare = json::parse(read_text(c.out_dir / "prepare.json", "prepare"));
    const json extract = json::parse(read_text(c.out_dir / "extract.json", "extract"));
    const json baseline = json::parse(read_text(c.out_dir / "baseline.json", "baseline"));
    const json evaluation = json::parse(read_text(c.out_dir / "evaluation.json", "evaluate"));
    r.baselines.global_only_validation = baseline.at("global_only_validation").get<double>();
    r.baselines.full_validation = baseline.at("full_validation").get<double>();
    const json& models = evaluation.at("models");
    const json& timing = evaluation.at("timing");
    r.full_test_accuracy = models.at("full").at("test_accuracy").get<double>();
    r.full_mean_predict_seconds = timing.at("full_mean_predict_seconds").get<double>();
    r.phase_seconds["prepare"] = phase_wall_clock(prepare);
    r.phase_seconds["extract"] = phase_wall_clock(extract);
    r.phase_seconds["baseline"] = phase_wall_clock(baseline);
    r.phase_seconds["evaluate"] = phase_wall_clock(evaluation);

    const auto load_variant = [&](const std::string& name, bool wanted) -> std::optional<VariantOutcome> {
      if (!wanted) return std::nullopt;
      VariantOutcome o;
      o.selection = selection_from_json(read_text(c.out_dir / "results" / (name + ".json"), "search"));
      if (!models.contains(name)) fail(ErrorCode::PhaseOrder, "evaluation lacks '" + name + "'; rerun 'evaluate'");
      o.test_accuracy = models.at(name).at("test_accuracy").get<double>();
      o.feature_count = models.at(name).at("feature_count").get<std::size_t>();
      o.mean_predict_seconds = timing.at(name + "_mean_predict_seconds").get<double>();
      r.phase_seconds["search_" + name] = o.selection.wall_clock_seconds;
      return o;
    };
    r.enhanced = load_variant("enhanced", c.variants.enhanced);
    r.basic = load_variant("basic", c.variants.basic);

    write_text(c.out_dir / "report.json", report_to_json(r));
    write_text(c.out_dir / "table_accuracy.csv", accuracy_table_csv(r));
    write_text(c.out_dir / "table_timing.csv", timing_table_csv(r));
    return r;
  });
}

RunReport run_pipeline(const ExperimentConfig& c) {
  run_prepare(c);
  run_extract(c);
  run_baseline(c);
  run_search(c);
  run_evaluate(c);
  return run_report(c);
}

OptimizeResult bench_sphere(int dimension, double lo, double hi, const HSParams& params, const fs::path& csv_path) {
  if (dimension < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
  const std::vector<Bounds> bounds(static_cast<std::size_t>(dimension), Bounds{lo, hi});
  const Objective sphere = [](std::span<const double> x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return s;
  };
  OptimizeResult result = optimize(sphere, bounds, params);
  if (!csv_path.empty()) {
    std::ostringstream out;
    out << "improvisation,best_value\n";
    char buf[32];
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", result.trajectory[i]);
      out << i + 1 << ',' << buf << '\n';
    }
    write_text(csv_path, out.str());
  }
  return result;
}

}  // namespace rh
