#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "medrl/rng.hpp"
#include "medrl/stage_gate.hpp"

using namespace medrl;

namespace {

struct Constant {
  int label;
};
Classification classify(const Constant& c, const FeatureVector&) {
  return {c.label, c.label == 1 ? 1.0 : 0.0};
}

struct Counting {
  mutable int calls = 0;
};
Classification classify(const Counting& c, const FeatureVector&) {
  ++c.calls;
  return {1, 1.0};
}

FeatureVector with_stem(double stem) {
  Morphology m;
  m.stem_length_cm = stem;
  return FeatureVector::from(m, 0.0);
}

std::vector<LabeledFeature> clusters(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<LabeledFeature> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    LabeledFeature f;
    f.label = label;
    for (std::size_t k = 0; k < FeatureVector::kSize; ++k) {
      f.features.values[k] = (label ? 5.0 : -5.0) + standard_normal(rng);
    }
    f.features.values[4] = 1000.0 * f.features.values[4];  // a feature on a larger scale
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_SUITE("stage_gate") {

TEST_CASE("threshold decisions") {
  const GateThresholds th{2.0, 15.0};
  Counting sex;
  const StageDecision g = gate_decide(with_stem(1.0), th, Constant{1}, sex);
  CHECK(g == StageDecision{GrowingPeriod::Germination, Sex::Unknown});
  const StageDecision s = gate_decide(with_stem(10.0), th, Constant{1}, sex);
  CHECK(s == StageDecision{GrowingPeriod::Seedling, Sex::Unknown});
  CHECK(sex.calls == 0);
  const StageDecision b = gate_decide(with_stem(20.0), th, Constant{1}, Constant{1});
  CHECK(b == StageDecision{GrowingPeriod::Blooming, Sex::Female});
  const StageDecision m = gate_decide(with_stem(20.0), th, Constant{0}, Constant{0});
  CHECK(m == StageDecision{GrowingPeriod::Mature, Sex::Male});
}

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS((GateThresholds{15.0, 2.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GateThresholds{0.0, 2.0}.validate()), std::invalid_argument);
}

TEST_CASE("logistic classifier") {
  BinaryClassifier zero;
  const Classification z = classify(zero, with_stem(12.0));
  CHECK(z.score == 0.5);
  CHECK(z.label == 0);

  BinaryClassifier big;
  big.bias = 800.0;
  const Classification s = classify(big, with_stem(1.0));
  CHECK(s.label == 1);
  CHECK(s.score == doctest::Approx(1.0));

  Rng rng(4);
  BinaryClassifier w;
  for (double& x : w.weights) x = standard_normal(rng);
  w.bias = standard_normal(rng);
  FeatureVector f;
  for (double& x : f.values) x = standard_normal(rng);
  double logit = w.bias;
  for (std::size_t k = 0; k < f.values.size(); ++k) logit += w.weights[k] * f.values[k];
  CHECK(classify(w, f).score == doctest::Approx(1.0 / (1.0 + std::exp(-logit))).epsilon(1e-14));

  BinaryClassifier wrong;
  wrong.weights.resize(3);
  CHECK_THROWS_AS(classify(wrong, f), std::invalid_argument);
}

TEST_CASE("training on separable clusters") {
  const auto data = clusters(8, 400);
  const BinaryClassifier clf = train_classifier(data, 0.5, 500, 1);
  CHECK(accuracy(clf, data) >= 0.99);

  auto twice = data;
  twice.insert(twice.end(), data.begin(), data.end());
  // Same objective; only the summation order differs.
  const BinaryClassifier dup = train_classifier(twice, 0.5, 500, 1);
  for (std::size_t k = 0; k < clf.weights.size(); ++k) {
    CHECK(dup.weights[k] == doctest::Approx(clf.weights[k]).epsilon(1e-9));
  }
  CHECK(dup.bias == doctest::Approx(clf.bias).epsilon(1e-9));

  std::vector<LabeledFeature> one_class(data.begin(), data.begin() + 1);
  CHECK_THROWS_AS(train_classifier(one_class, 0.5, 10, 1), std::invalid_argument);
}

}  // TEST_SUITE
