#include "medrl/growth_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "medrl/error.hpp"
#include "medrl/parallel.hpp"

namespace medrl {

namespace {

constexpr std::size_t kOut = Morphology::kSize;

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

/// Normalized input and target of one sample, as used by the training objective.
using Pinned = std::array<bool, kOut>;

struct Normalized {
  std::vector<double> input;
  std::array<double, kOut> target{};
};

Normalized normalize_sample(const GrowthModel& m, const WindowSample& s) {
  Normalized z;
  const std::vector<double> raw = s.input();
  if (raw.size() != m.net.input_size()) {
    throw std::invalid_argument("growth model expects input of size " +
                                std::to_string(m.net.input_size()) + ", got " +
                                std::to_string(raw.size()));
  }
  z.input.resize(raw.size());
  m.input_norm.normalize(raw, z.input);
  for (std::size_t k = 0; k < kOut; ++k) {
    z.target[k] = (s.target[k] - m.target_norm.mean[k]) / m.target_norm.scale[k];
  }
  return z;
}

// Pinned fields are predicted exactly, so they add nothing to the loss.
double normalized_loss(const Mlp& net, const Normalized& z, const Pinned& pinned) {
  std::array<double, kOut> y{};
  net.forward(z.input, y);
  for (std::size_t k = 0; k < kOut; ++k) {
    if (pinned[k]) y[k] = z.target[k];
  }
  return loss_mse(y, z.target);
}

/// Adds the gradient of weight * mse(net(z.input), z.target) to grad.
void accumulate(const Mlp& net, const Normalized& z, const Pinned& pinned, double weight,
                std::span<double> grad, std::vector<double>& hidden) {
  std::array<double, kOut> y{};
  hidden.resize(net.hidden_size());
  net.forward(z.input, y, hidden);
  std::array<double, kOut> dy{};
  for (std::size_t k = 0; k < kOut; ++k) {
    dy[k] = pinned[k] ? 0.0 : weight * 2.0 * (y[k] - z.target[k]) / static_cast<double>(kOut);
  }
  net.accumulate_gradient(z.input, hidden, dy, grad);
}

double mean_loss(const Mlp& net, const std::vector<Normalized>& set, const Pinned& pinned) {
  if (set.empty()) return 0.0;
  return chunked_sum(set.size(), [&](std::size_t i) { return normalized_loss(net, set[i], pinned); }) /
         static_cast<double>(set.size());
}

}  // namespace

std::vector<double> WindowSample::input() const {
  std::vector<double> x(env_window);
  x.insert(x.end(), morph_now.begin(), morph_now.end());
  return x;
}

std::vector<WindowSample> build_windows(const Dataset& data, std::size_t l) {
  if (l == 0) throw std::invalid_argument("window length must be >= 1");
  std::vector<WindowSample> out;
  for (const EpisodeRecords& ep : data.episodes) {
    const std::size_t N = ep.size();
    if (N < l + 1) continue;
    for (std::size_t n = l - 1; n + 1 < N; ++n) {
      const GrowingPeriod period = ep[n].period;
      bool same = true;
      for (std::size_t k = n + 1 - l; k <= n + 1; ++k) same = same && ep[k].period == period;
      if (!same) continue;
      WindowSample s;
      s.period = period;
      s.episode = ep[n].episode;
      s.step = ep[n].step;
      s.env_window.reserve(kNumVars * l);
      for (std::size_t k = n + 1 - l; k <= n; ++k) {
        s.env_window.insert(s.env_window.end(), ep[k].env.values.begin(), ep[k].env.values.end());
      }
      s.morph_now = ep[n].morphology.to_array();
      const auto next = ep[n + 1].morphology.to_array();
      for (std::size_t k = 0; k < kOut; ++k) s.target[k] = next[k] - s.morph_now[k];
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<double> window_input(std::span<const EnvState> window, const Morphology& morph_now) {
  std::vector<double> x;
  x.reserve(window.size() * kNumVars + kOut);
  for (const EnvState& e : window) x.insert(x.end(), e.values.begin(), e.values.end());
  const auto m = morph_now.to_array();
  x.insert(x.end(), m.begin(), m.end());
  return x;
}

Normalizer Normalizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Normalizer::fit: no rows");
  const std::size_t d = rows.front().size();
  Normalizer n;
  n.mean.assign(d, 0.0);
  n.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double first = rows.front()[j];
    bool constant = true;
    double sum = 0.0;
    for (const auto& r : rows) {
      sum += r[j];
      constant = constant && r[j] == first;
    }
    if (constant) {
      n.mean[j] = first;
      continue;
    }
    const double mean = sum / static_cast<double>(rows.size());
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
    n.mean[j] = mean;
    n.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return n;
}

Normalizer Normalizer::identity(std::size_t n) {
  return Normalizer{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

void Normalizer::normalize(std::span<const double> x, std::span<double> out) const {
  if (x.size() != mean.size() || out.size() != mean.size()) {
    throw std::invalid_argument("Normalizer: size mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
}

void Normalizer::denormalize(std::span<const double> z, std::span<double> out) const {
  if (z.size() != mean.size() || out.size() != mean.size()) {
    throw std::invalid_argument("Normalizer: size mismatch");
  }
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = mean[i] + scale[i] * z[i];
}

GrowthModel GrowthModel::zero(std::size_t window, std::size_t hidden) {
  GrowthModel m;
  m.window = window;
  m.net = Mlp(kNumVars * window + kOut, hidden, kOut);
  m.input_norm = Normalizer::identity(m.net.input_size());
  m.target_norm = Normalizer::identity(kOut);
  return m;
}

std::array<double, kOut> forward(const GrowthModel& model, std::span<const double> input) {
  if (input.size() != model.net.input_size()) {
    throw std::invalid_argument("growth model expects input of size " +
                                std::to_string(model.net.input_size()) + ", got " +
                                std::to_string(input.size()));
  }
  std::vector<double> z(input.size());
  model.input_norm.normalize(input, z);
  std::array<double, kOut> y{};
  model.net.forward(z, y);
  std::array<double, kOut> out{};
  for (std::size_t k = 0; k < kOut; ++k) {
    out[k] = model.pinned[k] ? model.target_norm.mean[k]
                             : model.target_norm.mean[k] + model.target_norm.scale[k] * y[k];
  }
  return out;
}

double loss_mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw std::invalid_argument("loss_mse: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double batch_loss(const GrowthModel& model, std::span<const WindowSample> batch) {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  double s = 0.0;
  for (const WindowSample& w : batch) s += normalized_loss(model.net, normalize_sample(model, w), model.pinned);
  return s / static_cast<double>(batch.size());
}

std::vector<double> grad(const GrowthModel& model, std::span<const WindowSample> batch) {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  std::vector<double> g(model.net.parameter_count(), 0.0);
  std::vector<double> hidden;
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (const WindowSample& w : batch) accumulate(model.net, normalize_sample(model, w), model.pinned, weight, g, hidden);
  return g;
}

double dataset_loss(const GrowthModel& model, std::span<const WindowSample> samples) {
  if (samples.empty()) throw std::invalid_argument("dataset_loss: no samples");
  return chunked_sum(samples.size(),
                     [&](std::size_t i) {
                       return normalized_loss(model.net, normalize_sample(model, samples[i]), model.pinned);
                     }) /
         static_cast<double>(samples.size());
}

double dataset_loss_serial(const GrowthModel& model, std::span<const WindowSample> samples) {
  if (samples.empty()) throw std::invalid_argument("dataset_loss: no samples");
  double s = 0.0;
  for (const WindowSample& w : samples) s += normalized_loss(model.net, normalize_sample(model, w), model.pinned);
  return s / static_cast<double>(samples.size());
}

GrowthTrainResult train(const std::vector<WindowSample>& samples, const GrowthTrainConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.window == 0 || cfg.hidden == 0 || cfg.batch_size == 0 || cfg.epochs == 0) {
    throw std::invalid_argument("train: window, hidden, batch_size and epochs must be > 0");
  }
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    throw std::invalid_argument("train: validation_fraction must be in (0,1)");
  }
  if (samples.front().env_window.size() != kNumVars * cfg.window) {
    throw std::invalid_argument("train: samples were built with a different window length");
  }

  GrowthTrainResult result;
  Rng shuffle_rng = make_rng(cfg.seed, Stream::Shuffle);

  // Split by episode so validation windows never share a trajectory with training ones.
  std::vector<std::uint64_t> episodes;
  for (const WindowSample& s : samples) episodes.push_back(s.episode);
  std::sort(episodes.begin(), episodes.end());
  episodes.erase(std::unique(episodes.begin(), episodes.end()), episodes.end());
  if (episodes.size() >= 2) {
    shuffle_in_place(episodes, shuffle_rng);
    auto n_val = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(episodes.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, episodes.size() - 1);
    result.validation_episodes.assign(episodes.begin(), episodes.begin() + n_val);
    std::sort(result.validation_episodes.begin(), result.validation_episodes.end());
    for (const WindowSample& s : samples) {
      const bool val = std::binary_search(result.validation_episodes.begin(),
                                          result.validation_episodes.end(), s.episode);
      (val ? result.validation_samples : result.train_samples).push_back(s);
    }
  } else {
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    shuffle_in_place(idx, shuffle_rng);
    auto n_val = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(samples.size())));
    n_val = std::min(std::max<std::size_t>(n_val, samples.size() > 1 ? 1 : 0), samples.size() - 1);
    std::vector<bool> is_val(samples.size(), false);
    for (std::size_t i = 0; i < n_val; ++i) is_val[idx[i]] = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      (is_val[i] ? result.validation_samples : result.train_samples).push_back(samples[i]);
    }
  }

  GrowthModel model = GrowthModel::zero(cfg.window, cfg.hidden);
  {
    std::vector<std::vector<double>> inputs, targets;
    for (const WindowSample& s : result.train_samples) {
      inputs.push_back(s.input());
      targets.emplace_back(s.target.begin(), s.target.end());
    }
    model.input_norm = Normalizer::fit(inputs);
    model.target_norm = Normalizer::fit(targets);
    for (std::size_t k = 0; k < kOut; ++k) {
      const double first = targets.front()[k];
      model.pinned[k] = std::all_of(targets.begin(), targets.end(),
                                    [&](const std::vector<double>& t) { return t[k] == first; });
    }
  }
  Rng init_rng = make_rng(cfg.seed, Stream::WeightInit);
  model.net.init_glorot(init_rng);

  std::vector<Normalized> train_z, val_z;
  for (const WindowSample& s : result.train_samples) train_z.push_back(normalize_sample(model, s));
  for (const WindowSample& s : result.validation_samples) val_z.push_back(normalize_sample(model, s));

  Adam adam(cfg.learning_rate);
  std::vector<std::size_t> order(train_z.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> g(model.net.parameter_count());
  std::vector<double> hidden;

  double best = std::numeric_limits<double>::infinity();
  GrowthModel best_model = model;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_in_place(order, shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(g.begin(), g.end(), 0.0);
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) accumulate(model.net, train_z[order[i]], model.pinned, weight, g, hidden);
      if (cfg.optimizer == Optimizer::Adam) {
        adam.step(model.net.parameters(), g);
      } else {
        sgd_step(model.net.parameters(), g, cfg.learning_rate);
      }
    }
    const double train_loss = mean_loss(model.net, train_z, model.pinned);
    const double val_loss = val_z.empty() ? train_loss : mean_loss(model.net, val_z, model.pinned);
    result.train_loss.push_back(train_loss);
    result.validation_loss.push_back(val_loss);
    if (val_loss < best) {
      best = val_loss;
      best_model = model;
      result.best_epoch = epoch;
    }
  }
  result.model = std::move(best_model);
  return result;
}

const GrowthModel& GrowthModelSet::at(GrowingPeriod p) const {
  const auto& m = models_[index_of(p)];
  if (!m) throw MissingArtifact("missing surrogate for period " + std::string(period_name(p)));
  return *m;
}

Morphology predict_growth(const GrowthModelSet& models, GrowingPeriod period,
                          std::span<const EnvState> env_window, const Morphology& morph_now) {
  const GrowthModel& model = models.at(period);
  if (env_window.size() < model.window) {
    throw std::invalid_argument("predict_growth: climate window shorter than model window");
  }
  const auto window = env_window.subspan(env_window.size() - model.window);
  const auto delta = forward(model, window_input(window, morph_now));
  auto next = morph_now.to_array();
  for (std::size_t k = 0; k < kOut; ++k) next[k] = std::max(0.0, next[k] + delta[k]);
  next[1] = std::round(next[1]);
  return Morphology::from_array(next);
}

PlantState SurrogatePlant::advance(const PlantState& p, std::span<const EnvState> window,
                                   double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  PlantState next = p;
  next.morphology = predict_growth(*models_, p.period, window, p.morphology);
  next.age_s += dt;
  next.time_in_period_s += dt;
  return period_transition(next, params_);
}

std::array<double, kOut> normalized_rmse(const GrowthModelSet& models, GrowingPeriod period,
                                         std::span<const WindowSample> samples,
                                         const std::array<double, kOut>& field_scale) {
  if (samples.empty()) throw std::invalid_argument("normalized_rmse: no samples");
  std::array<double, kOut> sse{};
  std::vector<EnvState> window;
  for (const WindowSample& s : samples) {
    window.assign(s.env_window.size() / kNumVars, EnvState{});
    for (std::size_t i = 0; i < window.size(); ++i) {
      for (std::size_t v = 0; v < kNumVars; ++v) window[i].values[v] = s.env_window[i * kNumVars + v];
    }
    const auto pred = predict_growth(models, period, window, Morphology::from_array(s.morph_now))
                          .to_array();
    for (std::size_t k = 0; k < kOut; ++k) {
      const double truth = s.morph_now[k] + s.target[k];
      sse[k] += (pred[k] - truth) * (pred[k] - truth);
    }
  }
  std::array<double, kOut> out{};
  for (std::size_t k = 0; k < kOut; ++k) {
    out[k] = std::sqrt(sse[k] / static_cast<double>(samples.size())) / field_scale[k];
  }
  return out;
}

std::array<double, kOut> morphology_ranges(const Dataset& data) {
  std::array<double, kOut> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& ep : data.episodes) {
    for (const Record& r : ep) {
      const auto m = r.morphology.to_array();
      for (std::size_t k = 0; k < kOut; ++k) {
        lo[k] = std::min(lo[k], m[k]);
        hi[k] = std::max(hi[k], m[k]);
      }
    }
  }
  std::array<double, kOut> out{};
  for (std::size_t k = 0; k < kOut; ++k) {
    const double r = hi[k] - lo[k];
    out[k] = r > 0.0 && std::isfinite(r) ? r : 1.0;
  }
  return out;
}

}  // namespace medrl
