#include "medrl/stage_gate.hpp"

#include <cmath>
#include <stdexcept>

#include "medrl/rng.hpp"

namespace medrl {

namespace {
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}
}  // namespace

void GateThresholds::validate() const {
  if (!(delta1_cm > 0.0 && delta1_cm < delta2_cm)) {
    throw std::invalid_argument("gate thresholds need 0 < delta1 < delta2");
  }
}

FeatureVector FeatureVector::from(const Morphology& m, double time_in_run_s) {
  const auto a = m.to_array();
  return FeatureVector{{a[0], a[1], a[2], a[3], time_in_run_s}};
}

Classification classify(const BinaryClassifier& clf, const FeatureVector& f) {
  if (clf.weights.size() != FeatureVector::kSize) {
    throw std::invalid_argument("classifier has " + std::to_string(clf.weights.size()) +
                                " weights, features have " + std::to_string(FeatureVector::kSize));
  }
  double z = clf.bias;
  for (std::size_t i = 0; i < FeatureVector::kSize; ++i) z += clf.weights[i] * f.values[i];
  const double score = sigmoid(z);
  return {score > 0.5 ? 1 : 0, score};
}

BinaryClassifier train_classifier(const std::vector<LabeledFeature>& data, double learning_rate,
                                  std::size_t epochs, std::uint64_t seed) {
  constexpr std::size_t d = FeatureVector::kSize;
  bool has0 = false, has1 = false;
  for (const auto& s : data) {
    if (s.label != 0 && s.label != 1) throw std::invalid_argument("labels must be 0 or 1");
    (s.label ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw std::invalid_argument("train_classifier: need both labels present");

  const double n = static_cast<double>(data.size());
  std::array<double, d> mean{}, scale{};
  for (const auto& s : data) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += s.features.values[i];
  }
  for (double& m : mean) m /= n;
  for (const auto& s : data) {
    for (std::size_t i = 0; i < d; ++i) {
      const double c = s.features.values[i] - mean[i];
      scale[i] += c * c;
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / n);
    if (!(s > 1e-12)) s = 1.0;
  }

  std::vector<std::array<double, d>> z(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) z[k][i] = (data[k].features.values[i] - mean[i]) / scale[i];
  }

  Rng rng = make_rng(seed, Stream::WeightInit);
  std::array<double, d> w{};
  for (double& v : w) v = 0.01 * (2.0 * uniform01(rng) - 1.0);
  double b = 0.0;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::array<double, d> gw{};
    double gb = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      double logit = b;
      for (std::size_t i = 0; i < d; ++i) logit += w[i] * z[k][i];
      const double err = sigmoid(logit) - static_cast<double>(data[k].label);
      for (std::size_t i = 0; i < d; ++i) gw[i] += err * z[k][i];
      gb += err;
    }
    for (std::size_t i = 0; i < d; ++i) w[i] -= learning_rate * gw[i] / n;
    b -= learning_rate * gb / n;
  }

  BinaryClassifier clf;
  clf.bias = b;
  for (std::size_t i = 0; i < d; ++i) {
    clf.weights[i] = w[i] / scale[i];
    clf.bias -= w[i] * mean[i] / scale[i];
  }
  return clf;
}

double accuracy(const BinaryClassifier& clf, const std::vector<LabeledFeature>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data) hits += classify(clf, s.features).label == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace medrl
