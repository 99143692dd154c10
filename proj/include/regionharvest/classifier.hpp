#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regionharvest/features.hpp"

namespace rh {

enum class ClassifierKind { MaxMarginLinear, NearestCentroid };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);  // "linear" | "centroid"

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::MaxMarginLinear;
  int epochs = 50;
  double lambda = 1e-3;

  bool operator==(const ClassifierConfig&) const = default;
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::MaxMarginLinear;
  int class_count = 0;
  std::size_t feature_length = 0;
  // Linear: class_count rows of feature_length weights, plus one bias each.
  std::vector<double> weights;
  std::vector<double> biases;
  // Nearest centroid: class_count rows of feature_length means.
  std::vector<double> centroids;
  ClassifierConfig config;
  std::uint64_t seed = 0;

  bool operator==(const TrainedModel&) const = default;
};

// Linear models: one-vs-rest hinge loss trained with Pegasos-style
// stochastic subgradient steps (step 1/(lambda*t), bias as an extra
// regularized input fixed at 1), sample order reshuffled every epoch from
// `seed`. Centroid models: per-class means. Class count is max label + 1 and
// every class in between must be present.
TrainedModel train(std::span<const FeatureVector> vectors, std::span<const int> labels,
                   const ClassifierConfig& config, std::uint64_t seed);

// Per-class scores: w.x + b for linear models, negated squared Euclidean
// distance for centroid models. `out` must hold class_count values.
void scores(const TrainedModel& model, std::span<const double> vector, std::span<double> out);

// argmax of scores(); ties go to the lowest class id.
int predict(const TrainedModel& model, std::span<const double> vector);

struct EvalReport {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // 0 for classes without evaluation samples.
  std::vector<double> per_class_accuracy;
  // Wall clock around predict() only, seconds per sample.
  double mean_predict_time = 0.0;
};

EvalReport evaluate(const TrainedModel& model, std::span<const FeatureVector> vectors, std::span<const int> labels);

struct TimingProtocol {
  int warmup_calls = 100;
  int timed_calls = 2000;
  int repeats = 5;
};

// Mean seconds per predict() call: `warmup_calls` untimed calls, then
// `repeats` batches of `timed_calls` calls cycling through `vectors`; the
// smallest batch mean is reported.
double time_predictions(const TrainedModel& model, std::span<const FeatureVector> vectors,
                        const TimingProtocol& protocol = {});

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace rh
