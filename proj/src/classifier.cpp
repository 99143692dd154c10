#include "regionharvest/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "regionharvest/error.hpp"
#include "regionharvest/rng.hpp"

namespace rh {

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::MaxMarginLinear ? "linear" : "centroid";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "linear" || name == "max-margin-linear") return ClassifierKind::MaxMarginLinear;
  if (name == "centroid" || name == "nearest-centroid") return ClassifierKind::NearestCentroid;
  fail(ErrorCode::InvalidArgument, "unknown classifier '" + name + "' (expected linear|centroid)");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void train_linear(TrainedModel& model, std::span<const FeatureVector> vectors, std::span<const int> labels) {
  const std::size_t d = model.feature_length;
  const auto k_count = static_cast<std::size_t>(model.class_count);
  const double lambda = model.config.lambda;
  // w_k = scale_k * v_k; the last entry of v_k is the bias weight.
  std::vector<double> v(k_count * (d + 1), 0.0);
  std::vector<double> scale(k_count, 1.0);

  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(model.seed);
  long t = 0;
  for (int epoch = 0; epoch < model.config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * lambda;
      const std::span<const double> x = vectors[idx];
      for (std::size_t k = 0; k < k_count; ++k) {
        double* vk = v.data() + k * (d + 1);
        const double y = labels[idx] == static_cast<int>(k) ? 1.0 : -1.0;
        const double margin = y * scale[k] * (dot(x, {vk, d}) + vk[d]);
        if (shrink <= 0.0) {
          std::fill(vk, vk + d + 1, 0.0);
          scale[k] = 1.0;
        } else {
          scale[k] *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * y / scale[k];
          for (std::size_t j = 0; j < d; ++j) vk[j] += step * x[j];
          vk[d] += step;
        }
      }
    }
  }
  model.weights.assign(k_count * d, 0.0);
  model.biases.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double* vk = v.data() + k * (d + 1);
    for (std::size_t j = 0; j < d; ++j) model.weights[k * d + j] = scale[k] * vk[j];
    model.biases[k] = scale[k] * vk[d];
  }
}

void train_centroid(TrainedModel& model, std::span<const FeatureVector> vectors, std::span<const int> labels) {
  const std::size_t d = model.feature_length;
  const auto k_count = static_cast<std::size_t>(model.class_count);
  model.centroids.assign(k_count * d, 0.0);
  std::vector<std::size_t> counts(k_count, 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto k = static_cast<std::size_t>(labels[i]);
    ++counts[k];
    for (std::size_t j = 0; j < d; ++j) model.centroids[k * d + j] += vectors[i][j];
  }
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t j = 0; j < d; ++j) model.centroids[k * d + j] /= static_cast<double>(counts[k]);
}

}  // namespace

TrainedModel train(std::span<const FeatureVector> vectors, std::span<const int> labels, const ClassifierConfig& config,
                   std::uint64_t seed) {
  if (vectors.empty()) fail(ErrorCode::InvalidArgument, "cannot train on an empty set");
  if (vectors.size() != labels.size()) fail(ErrorCode::InvalidArgument, "vector and label counts differ");
  if (config.epochs < 1 || !(config.lambda > 0.0))
    fail(ErrorCode::InvalidArgument, "classifier needs epochs >= 1 and lambda > 0");
  const std::size_t d = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != d) fail(ErrorCode::InvalidArgument, "inconsistent feature vector lengths");
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 0) fail(ErrorCode::InvalidArgument, "negative label");
  std::vector<bool> present(static_cast<std::size_t>(max_label) + 1, false);
  for (const int l : labels) present[static_cast<std::size_t>(l)] = true;
  for (std::size_t k = 0; k < present.size(); ++k)
    if (!present[k]) fail(ErrorCode::InvalidArgument, "class " + std::to_string(k) + " missing from training data");

  TrainedModel model;
  model.kind = config.kind;
  model.class_count = max_label + 1;
  model.feature_length = d;
  model.config = config;
  model.seed = seed;
  if (config.kind == ClassifierKind::MaxMarginLinear)
    train_linear(model, vectors, labels);
  else
    train_centroid(model, vectors, labels);
  return model;
}

namespace {

void check_length(const TrainedModel& model, std::size_t n) {
  if (n != model.feature_length)
    fail(ErrorCode::InvalidArgument, "feature vector length " + std::to_string(n) + " != model length " +
                                         std::to_string(model.feature_length));
}

double class_score(const TrainedModel& model, std::span<const double> x, std::size_t k) {
  const std::size_t d = model.feature_length;
  if (model.kind == ClassifierKind::MaxMarginLinear)
    return dot(x, {model.weights.data() + k * d, d}) + model.biases[k];
  const double* c = model.centroids.data() + k * d;
  double dist = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = x[j] - c[j];
    dist += diff * diff;
  }
  return -dist;
}

}  // namespace

void scores(const TrainedModel& model, std::span<const double> vector, std::span<double> out) {
  check_length(model, vector.size());
  if (out.size() < static_cast<std::size_t>(model.class_count))
    fail(ErrorCode::InvalidArgument, "score buffer too small");
  for (std::size_t k = 0; k < static_cast<std::size_t>(model.class_count); ++k)
    out[k] = class_score(model, vector, k);
}

int predict(const TrainedModel& model, std::span<const double> vector) {
  check_length(model, vector.size());
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < static_cast<std::size_t>(model.class_count); ++k) {
    const double s = class_score(model, vector, k);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

EvalReport evaluate(const TrainedModel& model, std::span<const FeatureVector> vectors, std::span<const int> labels) {
  if (vectors.empty()) fail(ErrorCode::InvalidArgument, "cannot evaluate on an empty set");
  if (vectors.size() != labels.size()) fail(ErrorCode::InvalidArgument, "vector and label counts differ");
  using clock = std::chrono::steady_clock;
  const auto k_count = static_cast<std::size_t>(model.class_count);
  std::vector<std::size_t> class_total(k_count, 0), class_correct(k_count, 0);
  EvalReport report;
  report.total = vectors.size();
  clock::duration elapsed{};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto start = clock::now();
    const int p = predict(model, vectors[i]);
    elapsed += clock::now() - start;
    const bool hit = p == labels[i];
    if (hit) ++report.correct;
    if (labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < k_count) {
      ++class_total[static_cast<std::size_t>(labels[i])];
      if (hit) ++class_correct[static_cast<std::size_t>(labels[i])];
    }
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  report.per_class_accuracy.resize(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k)
    if (class_total[k] > 0)
      report.per_class_accuracy[k] = static_cast<double>(class_correct[k]) / static_cast<double>(class_total[k]);
  report.mean_predict_time = std::chrono::duration<double>(elapsed).count() / static_cast<double>(report.total);
  return report;
}

double time_predictions(const TrainedModel& model, std::span<const FeatureVector> vectors,
                        const TimingProtocol& protocol) {
  if (vectors.empty()) fail(ErrorCode::InvalidArgument, "cannot time predictions on an empty set");
  if (protocol.timed_calls < 1 || protocol.repeats < 1 || protocol.warmup_calls < 0)
    fail(ErrorCode::InvalidArgument, "invalid timing protocol");
  using clock = std::chrono::steady_clock;
  volatile int sink = 0;
  std::size_t next = 0;
  const auto call = [&] {
    sink = sink + predict(model, vectors[next]);
    next = next + 1 == vectors.size() ? 0 : next + 1;
  };
  for (int i = 0; i < protocol.warmup_calls; ++i) call();
  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < protocol.repeats; ++rep) {
    const auto start = clock::now();
    for (int i = 0; i < protocol.timed_calls; ++i) call();
    const double mean = std::chrono::duration<double>(clock::now() - start).count() / protocol.timed_calls;
    best = std::min(best, mean);
  }
  return best;
}

std::string model_to_json(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(model.kind);
  j["class_count"] = model.class_count;
  j["feature_length"] = model.feature_length;
  j["weights"] = model.weights;
  j["biases"] = model.biases;
  j["centroids"] = model.centroids;
  j["config"] = {{"epochs", model.config.epochs}, {"lambda", model.config.lambda}};
  j["seed"] = model.seed;
  return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TrainedModel m;
    m.kind = parse_classifier_kind(j.at("kind").get<std::string>());
    m.class_count = j.at("class_count").get<int>();
    m.feature_length = j.at("feature_length").get<std::size_t>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.biases = j.at("biases").get<std::vector<double>>();
    m.centroids = j.at("centroids").get<std::vector<double>>();
    m.config.kind = m.kind;
    m.config.epochs = j.at("config").at("epochs").get<int>();
    m.config.lambda = j.at("config").at("lambda").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto k = static_cast<std::size_t>(m.class_count);
    const std::size_t expect = k * m.feature_length;
    const bool ok = m.kind == ClassifierKind::MaxMarginLinear
                        ? m.weights.size() == expect && m.biases.size() == k
                        : m.centroids.size() == expect;
    if (m.class_count < 1 || !ok) fail(ErrorCode::InvalidArgument, "model parameter arrays do not match dimensions");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace rh
