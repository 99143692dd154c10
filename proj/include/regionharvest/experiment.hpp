#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regionharvest/classifier.hpp"
#include "regionharvest/dataset.hpp"
#include "regionharvest/region_search.hpp"

namespace rh {

// Flat key/value view of a configuration, e.g. "enhanced.hmcr" -> "0.85".
using ConfigMap = std::map<std::string, std::string>;

// INI-style text: `key = value` lines, `#`/`;` comments, and `[section]`
// headers that prefix following keys with "section.".
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::filesystem::path& path);

struct VariantSelection {
  bool enhanced = true;
  bool basic = true;
};
VariantSelection parse_variant(const std::string& name);  // enhanced|basic|both

struct ExperimentConfig {
  // Dataset source: a manifest path, or the synthetic corpus when empty.
  std::string manifest;
  int synthetic_classes = 10;
  int synthetic_per_class = 100;
  double synthetic_noise = 0.05;

  int normalize_height = kDefaultNormalizedSize;
  int normalize_width = kDefaultNormalizedSize;
  SplitRatios ratios;
  ClassifierConfig classifier;

  VariantSelection variants;
  RegionSearchParams enhanced;
  // Basic variant memory/rates; its improvisation budget is matched to the
  // enhanced variant's fitness requests.
  HSParams basic{16, 0.85, 0.45, 1.0, 25, 0};

  TimingProtocol timing;

  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "regionharvest-out";

  // Unknown keys and unparsable values throw InvalidArgument. Keys not
  // present keep their defaults.
  static ExperimentConfig from_map(const ConfigMap& values);
  // Every effective setting except the output directory.
  ConfigMap to_map() const;

  // Seeds handed to the individual phases; all derive from `seed`.
  std::uint64_t search_seed() const { return seed; }
  std::uint64_t classifier_seed() const { return seed; }
};

// FNV-1a over the canonical `key=value\n` rendering of to_map(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Lines embedded (as comments or a JSON object) in every output file.
std::vector<std::string> provenance_lines(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Baselines {
  double global_only_validation = 0.0;
  double full_validation = 0.0;
  bool operator==(const Baselines&) const = default;
};

struct VariantOutcome {
  SelectionResult selection;
  double test_accuracy = 0.0;
  double mean_predict_seconds = 0.0;
  std::size_t feature_count = 0;
};

struct RunReport {
  ConfigMap config;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string dataset;
  Baselines baselines;
  double full_test_accuracy = 0.0;
  double full_mean_predict_seconds = 0.0;
  std::optional<VariantOutcome> enhanced;
  std::optional<VariantOutcome> basic;
  // Seconds per pipeline phase.
  std::map<std::string, double> phase_seconds;
};

// (16 - |B|) / 16.
double region_reduction(const RegionSubset& best);
// Percentage with two decimals, e.g. "43.75".
std::string format_percent(double fraction);

std::string selection_to_json(const SelectionResult& result, const ExperimentConfig* config = nullptr);
SelectionResult selection_from_json(const std::string& text);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

// Drops every "timing" and "wall_clock_seconds" member, recursively.
std::string strip_timing(const std::string& json_text);

// dataset,present_work,basic_hs,without_sampling; test accuracy in percent, 4 decimals.
std::string accuracy_table_csv(const RunReport& report);
// Same columns; mean predict seconds per sample, 6 decimals.
std::string timing_table_csv(const RunReport& report);

// 4x4 map laid out as the image: selected regions as "[ i]", rejected as
// "  i ", followed by "selected=N rejected=M reduction=P%".
std::string render_region_map(const RegionSubset& selected);

// ---------------------------------------------------------------------------
// Phases. Each reads the artefacts of earlier phases from config.out_dir and
// writes its own; a missing prerequisite throws ErrorCode::PhaseOrder.
// Errors from inside a phase are rethrown prefixed with "<phase>: ".
// ---------------------------------------------------------------------------

struct PrepareSummary {
  std::size_t loaded = 0;
  std::size_t rejected_empty = 0;
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
  int class_count = 0;
};

PrepareSummary run_prepare(const ExperimentConfig& config);
void run_extract(const ExperimentConfig& config);
Baselines run_baseline(const ExperimentConfig& config);
std::vector<SelectionResult> run_search(const ExperimentConfig& config);
void run_evaluate(const ExperimentConfig& config);
RunReport run_report(const ExperimentConfig& config);

// prepare -> extract -> baseline -> search -> evaluate -> report.
RunReport run_pipeline(const ExperimentConfig& config);

// Continuous HS on the d-dimensional sphere over [lo, hi]^d; writes the
// `improvisation,best_value` trajectory CSV when `csv_path` is non-empty.
OptimizeResult bench_sphere(int dimension, double lo, double hi, const HSParams& params,
                            const std::filesystem::path& csv_path = {});

}  // namespace rh
