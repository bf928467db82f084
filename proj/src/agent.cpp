#include "medrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "medrl/error.hpp"
#include "medrl/growth_model.hpp"

namespace medrl {

std::string_view observation_mode_name(ObservationMode m) {
  return m == ObservationMode::Augmented ? "augmented" : "morphology";
}

std::optional<ObservationMode> parse_observation_mode(std::string_view s) {
  if (s == "augmented") return ObservationMode::Augmented;
  if (s == "morphology") return ObservationMode::MorphologyOnly;
  return std::nullopt;
}

ObservationEncoder ObservationEncoder::from(const EnvParams& env, const OracleParams& oracle,
                                            ObservationMode mode) {
  ObservationEncoder enc;
  enc.ranges = env.actuators;
  enc.mode = mode;
  double stem = 0.0, lambda = 0.0, alpha = 0.0, flower = 0.0;
  for (const PeriodParams& p : oracle.periods) {
    stem = std::max(stem, p.stem_max_cm);
    lambda = std::max(lambda, p.lambda_leaf_per_cm);
    alpha = std::max(alpha, p.alpha_area_cm2);
    flower = std::max(flower, p.r_flower_cm3_per_day);
  }
  auto positive = [](double v) { return v > 0.0 ? v : 1.0; };
  enc.morph_scale = {positive(stem), positive(lambda * stem), positive(alpha * lambda * stem),
                     positive(flower)};
  return enc;
}

Observation ObservationEncoder::encode(const PlantState& plant, const EnvState& env, double step,
                                       double episode_length) const {
  Observation o{};
  const auto m = plant.morphology.to_array();
  for (std::size_t i = 0; i < Morphology::kSize; ++i) o[i] = m[i] / morph_scale[i];
  if (mode == ObservationMode::MorphologyOnly) return o;
  for (Var v : kAllVars) {
    const VarActuator& a = ranges[v];
    o[4 + static_cast<std::size_t>(v)] = (env[v] - a.range_min) / (a.range_max - a.range_min);
  }
  o[8 + index_of(plant.period)] = 1.0;
  o[12] = episode_length > 0.0 ? step / episode_length : 0.0;
  return o;
}

ActionGrid::ActionGrid(const ActuatorParams& ranges, std::array<std::size_t, kNumVars> levels)
    : ranges_(ranges), levels_(levels), size_(1) {
  for (std::size_t k : levels_) {
    if (k == 0) throw std::invalid_argument("ActionGrid: every variable needs >= 1 level");
    size_ *= k;
  }
}

double ActionGrid::level_value(Var v, std::size_t level) const {
  const VarActuator& a = ranges_[v];
  const std::size_t k = levels_[static_cast<std::size_t>(v)];
  if (level >= k) throw std::out_of_range("ActionGrid: level out of range");
  if (k == 1) return 0.5 * (a.range_min + a.range_max);
  if (level == k - 1) return a.range_max;
  return a.range_min +
         (a.range_max - a.range_min) * static_cast<double>(level) / static_cast<double>(k - 1);
}

std::array<std::size_t, kNumVars> ActionGrid::level_tuple(std::size_t index) const {
  if (index >= size_) {
    throw std::out_of_range("action index " + std::to_string(index) + " outside grid of " +
                            std::to_string(size_));
  }
  std::array<std::size_t, kNumVars> t{};
  for (std::size_t i = kNumVars; i-- > 0;) {
    t[i] = index % levels_[i];
    index /= levels_[i];
  }
  return t;
}

std::size_t ActionGrid::index_of(const std::array<std::size_t, kNumVars>& tuple) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (tuple[i] >= levels_[i]) throw std::out_of_range("ActionGrid: level out of range");
    idx = idx * levels_[i] + tuple[i];
  }
  return idx;
}

Setpoints ActionGrid::action_to_setpoints(std::size_t index) const {
  const auto t = level_tuple(index);
  Setpoints u;
  for (Var v : kAllVars) u[v] = level_value(v, t[static_cast<std::size_t>(v)]);
  return u;
}

std::size_t ActionGrid::setpoints_to_action(const Setpoints& u) const {
  std::array<std::size_t, kNumVars> t{};
  for (Var v : kAllVars) {
    const std::size_t i = static_cast<std::size_t>(v);
    bool found = false;
    for (std::size_t l = 0; l < levels_[i] && !found; ++l) {
      if (level_value(v, l) == u[v]) {
        t[i] = l;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("setpoints are not a grid point");
  }
  return index_of(t);
}

std::size_t argmax(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

std::size_t select_action(std::span<const double> q, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon not in [0,1]");
  if (uniform01(rng) < epsilon) return static_cast<std::size_t>(uniform_index(rng, q.size()));
  return argmax(q);
}

double EpsilonSchedule::at(std::size_t step) const {
  if (decay_steps == 0 || step >= decay_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

double td_target(double reward, std::span<const double> next_q, bool done, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma not in [0,1)");
  if (done) return reward;
  return reward + gamma * next_q[argmax(next_q)];
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : data_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
}

void ReplayBuffer::push(const Transition& t) {
  if (!std::isfinite(t.reward)) throw std::invalid_argument("transition reward is not finite");
  data_[head_] = t;
  head_ = (head_ + 1) % data_.size();
  size_ = std::min(size_ + 1, data_.size());
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t oldest = size_ < data_.size() ? 0 : head_;
  return data_[(oldest + i) % data_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ < batch_size || batch_size == 0) {
    throw std::logic_error("replay buffer holds fewer transitions than the batch size");
  }
  std::vector<const Transition*> out(batch_size);
  for (auto& p : out) p = &at(static_cast<std::size_t>(uniform_index(rng, size_)));
  return out;
}

QNet::QNet(std::size_t hidden, std::size_t actions)
    : online(kObservationSize, hidden, actions), target(kObservationSize, hidden, actions) {}

double q_loss(const Mlp& net, std::span<const QTarget> batch) {
  if (batch.empty()) throw std::invalid_argument("q_loss: empty batch");
  std::vector<double> q(net.output_size());
  double s = 0.0;
  for (const QTarget& t : batch) {
    net.forward(t.observation, q);
    const double e = q.at(t.action) - t.target;
    s += e * e;
  }
  return s / static_cast<double>(batch.size());
}

std::vector<double> q_grad(const Mlp& net, std::span<const QTarget> batch) {
  if (batch.empty()) throw std::invalid_argument("q_grad: empty batch");
  std::vector<double> g(net.parameter_count(), 0.0);
  std::vector<double> q(net.output_size()), hidden(net.hidden_size()), dy(net.output_size(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const QTarget& t : batch) {
    net.forward(t.observation, q, hidden);
    std::fill(dy.begin(), dy.end(), 0.0);
    dy.at(t.action) = 2.0 * (q[t.action] - t.target) * inv;
    net.accumulate_gradient(t.observation, hidden, dy, g);
  }
  return g;
}

std::string_view episode_scope_name(EpisodeScope s) {
  return s == EpisodeScope::LifeCycle ? "life_cycle" : "period";
}

std::optional<EpisodeScope> parse_episode_scope(std::string_view s) {
  if (s == "life_cycle") return EpisodeScope::LifeCycle;
  if (s == "period") return EpisodeScope::Period;
  return std::nullopt;
}

std::string_view train_mode_name(TrainMode m) {
  return m == TrainMode::Embedded ? "embedded" : "oracle";
}

std::optional<TrainMode> parse_train_mode(std::string_view s) {
  if (s == "embedded") return TrainMode::Embedded;
  if (s == "oracle") return TrainMode::Oracle;
  return std::nullopt;
}

void Hyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0,1)");
  for (double e : {epsilon.start, epsilon.end}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size == 0 || target_sync_steps == 0 || replay_capacity == 0 || hidden == 0 ||
      episodes == 0 || episode_length == 0) {
    throw std::invalid_argument("agent sizes and counts must be > 0");
  }
  if (batch_size > replay_capacity) throw std::invalid_argument("batch_size exceeds replay capacity");
}

std::vector<double> Agent::q_values(const Observation& obs, GrowingPeriod period) const {
  return nets[index_of(period)].online.forward(obs);
}

std::size_t Agent::greedy_action(const Observation& obs, GrowingPeriod period) const {
  return argmax(q_values(obs, period));
}

AgentTrainResult train_agent(const LoopConfig& config, const PlantModel& plant_model,
                             const ActionGrid& grid, const ObservationEncoder& encoder,
                             const Hyperparams& hp) {
  hp.validate();
  AgentTrainResult result{Agent{{}, encoder, grid}, {}};
  Agent& agent = result.agent;
  std::vector<Adam> optimizers;
  std::vector<ReplayBuffer> buffers;
  for (GrowingPeriod p : kAllPeriods) {
    QNet& net = agent.nets[index_of(p)];
    net = QNet(hp.hidden, grid.size());
    Rng init = make_rng(hp.seed, Stream::WeightInit, index_of(p));
    net.online.init_glorot(init);
    net.sync();
    optimizers.emplace_back(hp.learning_rate);
    buffers.emplace_back(hp.replay_capacity);
  }

  Rng eps_rng = make_rng(hp.seed, Stream::EpsilonGreedy);
  Rng replay_rng = make_rng(hp.seed, Stream::Replay);
  const double horizon = static_cast<double>(hp.episode_length);
  std::size_t global_step = 0;
  std::vector<QTarget> targets(hp.batch_size);
  std::vector<double> next_q(grid.size());

  for (std::size_t ep = 0; ep < hp.episodes; ++ep) {
    ClosedLoop loop(config, plant_model, sow_episode(hp.seed, ep, config.oracle),
                    derive_seed(hp.seed, Stream::EnvNoise, ep));
    Observation obs = encoder.encode(loop.plant(), loop.env(), 0.0, horizon);
    EpisodeSummary summary;
    summary.episode = ep;
    double loss_sum = 0.0;
    std::size_t updates = 0;

    for (std::size_t n = 0; n < hp.episode_length; ++n) {
      const GrowingPeriod period = loop.plant().period;
      const std::size_t pi = index_of(period);
      const double eps = hp.epsilon.at(global_step);
      summary.epsilon = eps;
      const std::size_t action = select_action(agent.q_values(obs, period), eps, eps_rng);
      const StepOutcome out = loop.step(grid.action_to_setpoints(action));
      summary.episode_return += out.reward;

      Transition tr;
      tr.observation = obs;
      tr.action = action;
      tr.reward = out.reward;
      tr.next_observation = encoder.encode(loop.plant(), loop.env(), static_cast<double>(n + 1), horizon);
      tr.next_period = loop.plant().period;
      tr.done = n + 1 == hp.episode_length ||
                (hp.scope == EpisodeScope::Period && out.period_changed);
      buffers[pi].push(tr);
      obs = tr.next_observation;

      if (buffers[pi].size() >= hp.batch_size) {
        const auto batch = buffers[pi].sample(hp.batch_size, replay_rng);
        for (std::size_t i = 0; i < batch.size(); ++i) {
          const Transition& t = *batch[i];
          agent.nets[index_of(t.next_period)].target.forward(t.next_observation, next_q);
          targets[i] = {t.observation, t.action, td_target(t.reward, next_q, t.done, hp.gamma)};
        }
        Mlp& online = agent.nets[pi].online;
        loss_sum += q_loss(online, targets);
        optimizers[pi].step(online.parameters(), q_grad(online, targets));
        ++updates;
      }

      ++global_step;
      if (global_step % hp.target_sync_steps == 0) {
        for (QNet& q : agent.nets) q.sync();
      }
      ++summary.steps;
    }
    summary.mean_loss = updates ? loss_sum / static_cast<double>(updates) : 0.0;
    summary.final_period = loop.plant().period;
    result.log.push_back(summary);
  }
  return result;
}

AgentTrainResult train_agent(const LoopConfig& config, TrainMode mode,
                             const GrowthModelSet* surrogate, const ActionGrid& grid,
                             const ObservationEncoder& encoder, const Hyperparams& hp) {
  if (mode == TrainMode::Oracle) {
    const OraclePlant oracle(config.oracle);
    return train_agent(config, oracle, grid, encoder, hp);
  }
  if (surrogate == nullptr || !surrogate->has(GrowingPeriod::Germination)) {
    throw MissingArtifact("missing surrogate: embedded training needs trained growth models");
  }
  const SurrogatePlant plant(*surrogate, config.oracle);
  return train_agent(config, plant, grid, encoder, hp);
}

Policy greedy_policy(const Agent& agent) {
  return [&agent](const Observation& obs, GrowingPeriod period, std::size_t, Rng&) {
    return agent.greedy_action(obs, period);
  };
}

Policy random_policy(std::size_t actions) {
  return [actions](const Observation&, GrowingPeriod, std::size_t, Rng& rng) {
    return static_cast<std::size_t>(uniform_index(rng, actions));
  };
}

Policy sequence_policy(std::vector<std::size_t> actions) {
  if (actions.empty()) throw std::invalid_argument("sequence_policy: empty sequence");
  return [actions = std::move(actions)](const Observation&, GrowingPeriod, std::size_t step, Rng&) {
    return actions[std::min(step, actions.size() - 1)];
  };
}

std::vector<EpisodeResult> evaluate_policy(const LoopConfig& config, const Policy& policy,
                                           const ActionGrid& grid,
                                           const ObservationEncoder& encoder,
                                           std::size_t episodes, std::size_t episode_length,
                                           std::uint64_t seed) {
  const OraclePlant oracle(config.oracle);
  std::vector<EpisodeResult> results(episodes);
  const double horizon = static_cast<double>(episode_length);
  const auto n = static_cast<std::ptrdiff_t>(episodes);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    const auto ep = static_cast<std::size_t>(e);
    ClosedLoop loop(config, oracle, sow_episode(seed, ep, config.oracle),
                    derive_seed(seed, Stream::EnvNoise, ep));
    Rng rng = make_rng(seed, Stream::Baseline, ep);
    EpisodeResult& r = results[ep];
    r.steps.reserve(episode_length);
    for (std::size_t step = 0; step < episode_length; ++step) {
      const Observation obs =
          encoder.encode(loop.plant(), loop.env(), static_cast<double>(step), horizon);
      const std::size_t a = policy(obs, loop.plant().period, step, rng);
      r.steps.push_back(loop.step(grid.action_to_setpoints(a)));
      r.episode_return += r.steps.back().reward;
    }
  }
  return results;
}

double mean_return(const std::vector<EpisodeResult>& results) {
  if (results.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : results) s += r.episode_return;
  return s / static_cast<double>(results.size());
}

}  // namespace medrl
