#include <doctest.h>

#include <numeric>

#include "regionharvest/classifier.hpp"
#include "regionharvest/error.hpp"
#include "regionharvest/rng.hpp"

using namespace rh;

namespace {

struct Blobs {
  std::vector<FeatureVector> vectors;
  std::vector<int> labels;
};

// k Gaussian-ish clusters in [0,1]^d around random centres.
Blobs make_blobs(int k, int per_class, int d, double spread, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureVector> centres(static_cast<std::size_t>(k), FeatureVector(static_cast<std::size_t>(d)));
  for (auto& c : centres)
    for (auto& x : c) x = rng.uniform();
  Blobs b;
  for (int i = 0; i < per_class; ++i)
    for (int c = 0; c < k; ++c) {
      FeatureVector v = centres[static_cast<std::size_t>(c)];
      for (auto& x : v) x += rng.uniform(-spread, spread);
      b.vectors.push_back(std::move(v));
      b.labels.push_back(c);
    }
  return b;
}

}  // namespace

TEST_SUITE("classifier") {
  TEST_CASE("linear model separates two opposite corners") {
    const std::vector<FeatureVector> v{FeatureVector(6, 0.0), FeatureVector(6, 1.0)};
    const std::vector<int> labels{0, 1};
    const auto model = train(v, labels, {}, 3);
    CHECK(model.kind == ClassifierKind::MaxMarginLinear);
    CHECK(predict(model, v[0]) == 0);
    CHECK(predict(model, v[1]) == 1);
    CHECK(evaluate(model, v, labels).accuracy == 1.0);
  }

  TEST_CASE("centroid of one sample per class is that sample") {
    const std::vector<FeatureVector> v{{0.1, 0.2}, {0.7, 0.3}, {0.4, 0.9}};
    const std::vector<int> labels{0, 1, 2};
    const auto model = train(v, labels, {ClassifierKind::NearestCentroid}, 0);
    CHECK(model.centroids == std::vector<double>{0.1, 0.2, 0.7, 0.3, 0.4, 0.9});
    CHECK(predict(model, v[2]) == 2);
  }

  TEST_CASE("training is deterministic per seed") {
    const auto b = make_blobs(4, 20, 10, 0.2, 1);
    const auto a1 = train(b.vectors, b.labels, {}, 9);
    const auto a2 = train(b.vectors, b.labels, {}, 9);
    CHECK(a1 == a2);
    const auto a3 = train(b.vectors, b.labels, {}, 10);
    CHECK(a1.weights != a3.weights);
  }

  TEST_CASE("all-zero linear model predicts class 0") {
    TrainedModel m;
    m.kind = ClassifierKind::MaxMarginLinear;
    m.class_count = 3;
    m.feature_length = 4;
    m.weights.assign(12, 0.0);
    m.biases.assign(3, 0.0);
    CHECK(predict(m, std::vector<double>{0.3, 0.1, 0.9, 0.2}) == 0);
  }

  TEST_CASE("predict equals an independent score-then-argmax") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
      TrainedModel m;
      m.kind = ClassifierKind::MaxMarginLinear;
      m.class_count = 2 + rng.below(6);
      m.feature_length = static_cast<std::size_t>(1 + rng.below(10));
      for (std::size_t i = 0; i < m.feature_length * m.class_count; ++i) m.weights.push_back(rng.uniform(-1, 1));
      for (int c = 0; c < m.class_count; ++c) m.biases.push_back(rng.uniform(-1, 1));
      std::vector<double> x(m.feature_length);
      for (auto& v : x) v = rng.uniform();
      int best = 0;
      double best_score = -1e300;
      for (int c = 0; c < m.class_count; ++c) {
        double s = m.biases[c];
        for (std::size_t j = 0; j < x.size(); ++j) s += m.weights[c * m.feature_length + j] * x[j];
        if (s > best_score) {
          best_score = s;
          best = c;
        }
      }
      REQUIRE(predict(m, x) == best);
    }
  }

  TEST_CASE("predict rejects a length mismatch") {
    const std::vector<FeatureVector> v{{0.0, 0.0}, {1.0, 1.0}};
    const std::vector<int> labels{0, 1};
    const auto model = train(v, labels, {ClassifierKind::NearestCentroid}, 0);
    CHECK_THROWS_AS(predict(model, std::vector<double>{1.0}), Error);
  }

  TEST_CASE("train errors") {
    const std::vector<int> labels{0, 2};
    const std::vector<FeatureVector> v{{0.0}, {1.0}};
    CHECK_THROWS_AS(train(v, labels, {}, 0), Error);  // class 1 missing
    const std::vector<FeatureVector> ragged{{0.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(train(ragged, std::vector<int>{0, 1}, {}, 0), Error);
    CHECK_THROWS_AS(train(std::vector<FeatureVector>{}, std::vector<int>{}, {}, 0), Error);
  }

  TEST_CASE("evaluate") {
    const auto b = make_blobs(5, 30, 8, 0.05, 2);
    const auto model = train(b.vectors, b.labels, {}, 1);

    SUBCASE("accuracy equals a counting loop") {
      const auto test = make_blobs(5, 10, 8, 0.3, 2);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < test.vectors.size(); ++i) correct += predict(model, test.vectors[i]) == test.labels[i];
      const auto r = evaluate(model, test.vectors, test.labels);
      CHECK(r.correct == correct);
      CHECK(r.total == test.vectors.size());
      CHECK(r.accuracy == static_cast<double>(correct) / static_cast<double>(test.vectors.size()));
      // Per-class accuracy weighted by class counts recovers the accuracy.
      const double weighted = std::accumulate(r.per_class_accuracy.begin(), r.per_class_accuracy.end(), 0.0) / 5.0;
      CHECK(weighted == doctest::Approx(r.accuracy));
      CHECK(r.mean_predict_time >= 0.0);
    }
    SUBCASE("separable training data") { CHECK(evaluate(model, b.vectors, b.labels).accuracy == 1.0); }
    SUBCASE("labels wrong by construction") {
      std::vector<int> wrong;
      for (const auto& v : b.vectors) wrong.push_back((predict(model, v) + 1) % 5);
      CHECK(evaluate(model, b.vectors, wrong).accuracy == 0.0);
    }
    SUBCASE("order of evaluation samples does not matter") {
      auto vectors = b.vectors;
      auto labels = b.labels;
      std::reverse(vectors.begin(), vectors.end());
      std::reverse(labels.begin(), labels.end());
      CHECK(evaluate(model, vectors, labels).correct == evaluate(model, b.vectors, b.labels).correct);
    }
    SUBCASE("empty set is an error") {
      CHECK_THROWS_AS(evaluate(model, std::vector<FeatureVector>{}, std::vector<int>{}), Error);
    }
  }

  TEST_CASE("timing protocol returns a positive mean") {
    const auto b = make_blobs(3, 5, 20, 0.1, 3);
    const auto model = train(b.vectors, b.labels, {ClassifierKind::NearestCentroid}, 0);
    const double t = time_predictions(model, b.vectors, {100, 1000, 2});
    CHECK(t > 0.0);
    CHECK(t < 1e-2);
  }

  TEST_CASE("model JSON round trip") {
    const auto b = make_blobs(3, 10, 5, 0.1, 5);
    for (const auto kind : {ClassifierKind::MaxMarginLinear, ClassifierKind::NearestCentroid}) {
      const auto model = train(b.vectors, b.labels, {kind, 7, 0.01}, 42);
      CHECK(model_from_json(model_to_json(model)) == model);
    }
    CHECK(parse_classifier_kind("linear") == ClassifierKind::MaxMarginLinear);
    CHECK(parse_classifier_kind("centroid") == ClassifierKind::NearestCentroid);
    CHECK_THROWS_AS(parse_classifier_kind("svm-rbf"), Error);
  }
}
