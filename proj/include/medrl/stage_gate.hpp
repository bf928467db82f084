#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <vector>

#include "medrl/crop.hpp"

namespace medrl {

struct GateThresholds {
  double delta1_cm = 2.0;
  double delta2_cm = 15.0;

  /// Throws std::invalid_argument unless 0 < delta1 < delta2.
  void validate() const;
};

/// Classifier input: the four morphology fields then time since the start of
/// the run in seconds.
struct FeatureVector {
  static constexpr std::size_t kSize = 5;
  std::array<double, kSize> values{};

  static FeatureVector from(const Morphology& m, double time_in_run_s);
  double stem_length_cm() const { return values[0]; }
};

struct Classification {
  int label = 0;       ///< 0 or 1
  double score = 0.5;  ///< P(label = 1)
};

/// Logistic model on raw features. For the stage classifier label 1 means
/// Blooming (0 Mature); for the sex classifier label 1 means Female (0 Male).
struct BinaryClassifier {
  std::vector<double> weights = std::vector<double>(FeatureVector::kSize, 0.0);
  double bias = 0.0;

  friend bool operator==(const BinaryClassifier&, const BinaryClassifier&) = default;
};

/// score = sigmoid(w.f + b); label 1 iff score > 0.5, so a score of exactly
/// 0.5 gives label 0. Throws std::invalid_argument on a dimension mismatch.
Classification classify(const BinaryClassifier& clf, const FeatureVector& f);

/// Anything the gate can consult: a type with an ADL-visible
/// classify(const C&, const FeatureVector&) returning Classification.
template <class C>
concept FeatureClassifier = requires(const C& c, const FeatureVector& f) {
  { classify(c, f) } -> std::same_as<Classification>;
};

struct StageDecision {
  GrowingPeriod period = GrowingPeriod::Germination;
  Sex sex = Sex::Unknown;

  friend bool operator==(const StageDecision&, const StageDecision&) = default;
};

/// Stem thresholds pick Germination or Seedling; past delta2 the stage
/// classifier separates Mature from Blooming, and only then does the sex
/// classifier run.
template <FeatureClassifier StageClf, FeatureClassifier SexClf>
StageDecision gate_decide(const FeatureVector& f, const GateThresholds& th, const StageClf& stage_clf,
                          const SexClf& sex_clf) {
  const double stem = f.stem_length_cm();
  if (stem < th.delta1_cm) return {GrowingPeriod::Germination, Sex::Unknown};
  if (stem < th.delta2_cm) return {GrowingPeriod::Seedling, Sex::Unknown};
  StageDecision d;
  d.period = classify(stage_clf, f).label == 1 ? GrowingPeriod::Blooming : GrowingPeriod::Mature;
  d.sex = classify(sex_clf, f).label == 1 ? Sex::Female : Sex::Male;
  return d;
}

struct LabeledFeature {
  FeatureVector features;
  int label = 0;
};

/// Logistic regression by full-batch gradient descent on mean cross-entropy,
/// on standardized features; the returned weights are mapped back to raw
/// feature space. Throws std::invalid_argument unless both labels occur.
BinaryClassifier train_classifier(const std::vector<LabeledFeature>& data, double learning_rate,
                                  std::size_t epochs, std::uint64_t seed);

/// Fraction of samples whose predicted label matches.
double accuracy(const BinaryClassifier& clf, const std::vector<LabeledFeature>& data);

}  // namespace medrl
