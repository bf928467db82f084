#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "medrl/closed_loop.hpp"
#include "medrl/dataset.hpp"
#include "medrl/mlp.hpp"

namespace medrl {

/// Training pair for the growth surrogate.
///
/// Input layout (fixed): the l climate readings of the window, oldest first,
/// each as (temperature, humidity, light, co2); then the four morphology
/// fields (stem, leaf count, leaf area, flower volume) at the window's last
/// step. The target is the morphology change over that step.
struct WindowSample {
  std::vector<double> env_window;
  std::array<double, Morphology::kSize> morph_now{};
  std::array<double, Morphology::kSize> target{};
  GrowingPeriod period = GrowingPeriod::Germination;
  std::uint64_t episode = 0;
  std::uint64_t step = 0;

  std::vector<double> input() const;
};

/// Windows of length l over every episode. A sample at step n uses the
/// readings n-l+1..n and the morphology change from n to n+1; it is emitted
/// only when records n-l+1..n+1 share one period. A single-period episode of
/// N records yields N - l samples.
std::vector<WindowSample> build_windows(const Dataset& data, std::size_t l);

/// Input features of a window at inference time.
std::vector<double> window_input(std::span<const EnvState> window, const Morphology& morph_now);

/// Per-feature affine map to zero mean, unit scale.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> scale;

  /// Scales of zero-variance features are set to 1.
  static Normalizer fit(const std::vector<std::vector<double>>& rows);
  static Normalizer identity(std::size_t n);

  void normalize(std::span<const double> x, std::span<double> out) const;
  void denormalize(std::span<const double> z, std::span<double> out) const;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

enum class Optimizer { Adam, Sgd };

struct GrowthTrainConfig {
  std::size_t window = 4;
  std::size_t hidden = 32;
  double learning_rate = 3e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 150;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  Optimizer optimizer = Optimizer::Adam;
};

/// Network plus the normalization frozen at training time. Targets whose
/// training values were constant are pinned: the model returns that constant
/// for them regardless of the network output.
struct GrowthModel {
  std::size_t window = 4;
  Mlp net;
  Normalizer input_norm;
  Normalizer target_norm;
  std::array<bool, Morphology::kSize> pinned{};

  static GrowthModel zero(std::size_t window, std::size_t hidden);

  friend bool operator==(const GrowthModel&, const GrowthModel&) = default;
};

/// Predicted morphology change (raw units) for one input vector.
/// Throws std::invalid_argument if the input is not 4l + 4 long.
std::array<double, Morphology::kSize> forward(const GrowthModel& model, std::span<const double> input);

double loss_mse(std::span<const double> pred, std::span<const double> target);

/// Mean over the batch of the normalized-space MSE between network output
/// and normalized target. This is the training objective.
double batch_loss(const GrowthModel& model, std::span<const WindowSample> batch);

/// Exact gradient of batch_loss with respect to model.net parameters.
/// Throws std::invalid_argument on an empty batch.
std::vector<double> grad(const GrowthModel& model, std::span<const WindowSample> batch);

/// batch_loss over a whole sample set, parallel and deterministic.
double dataset_loss(const GrowthModel& model, std::span<const WindowSample> samples);
/// Single-threaded reference for dataset_loss.
double dataset_loss_serial(const GrowthModel& model, std::span<const WindowSample> samples);

struct GrowthTrainResult {
  GrowthModel model;
  std::vector<double> train_loss;       ///< full training-split loss after each epoch
  std::vector<double> validation_loss;  ///< validation loss after each epoch
  std::size_t best_epoch = 0;
  std::vector<std::uint64_t> validation_episodes;
  std::vector<WindowSample> train_samples;
  std::vector<WindowSample> validation_samples;
};

/// Mini-batch training with seeded shuffling; returns the weights of the
/// epoch with the lowest validation loss. The split is by episode.
/// Throws std::invalid_argument on an empty sample set.
GrowthTrainResult train(const std::vector<WindowSample>& samples, const GrowthTrainConfig& cfg);

/// One model per growing period.
class GrowthModelSet {
 public:
  void set(GrowingPeriod p, GrowthModel m) { models_[index_of(p)] = std::move(m); }
  bool has(GrowingPeriod p) const { return models_[index_of(p)].has_value(); }
  /// Throws MissingArtifact if no model exists for p.
  const GrowthModel& at(GrowingPeriod p) const;

 private:
  std::array<std::optional<GrowthModel>, kNumPeriods> models_;
};

/// morph_now plus the predicted change, clamped at zero, leaf count rounded.
/// Throws MissingArtifact when the period has no model.
Morphology predict_growth(const GrowthModelSet& models, GrowingPeriod period,
                          std::span<const EnvState> env_window, const Morphology& morph_now);

/// Plant dynamics driven by the surrogate. Period changes and sex reveal use
/// the oracle's stage thresholds, which are known to the controller.
class SurrogatePlant final : public PlantModel {
 public:
  SurrogatePlant(const GrowthModelSet& models, OracleParams stage_params)
      : models_(&models), params_(std::move(stage_params)) {}

  PlantState advance(const PlantState& p, std::span<const EnvState> window,
                     double dt) const override;

 private:
  const GrowthModelSet* models_;
  OracleParams params_;
};

/// Per-field RMSE of predicted next morphology divided by `field_scale`.
std::array<double, Morphology::kSize> normalized_rmse(
    const GrowthModelSet& models, GrowingPeriod period, std::span<const WindowSample> samples,
    const std::array<double, Morphology::kSize>& field_scale);

/// max - min of each morphology field over the dataset (1 where the range is 0).
std::array<double, Morphology::kSize> morphology_ranges(const Dataset& data);

}  // namespace medrl
