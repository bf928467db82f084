#include "medrl/closed_loop.hpp"

#include <algorithm>
#include <stdexcept>

namespace medrl {

PlantState OraclePlant::advance(const PlantState& p, std::span<const EnvState> window,
                                double dt) const {
  if (window.empty()) throw std::invalid_argument("OraclePlant: empty climate window");
  return grow_step(p, window.back(), dt, params_);
}

ClosedLoop::ClosedLoop(const LoopConfig& config, const PlantModel& plant_model,
                       PlantState initial_plant, std::uint64_t noise_seed)
    : config_(&config),
      model_(&plant_model),
      plant_(initial_plant),
      history_(std::max<std::size_t>(config.window, 1),
               reset(config.env.outdoor, config.start_time_s)),
      noise_rng_(noise_seed),
      t_(config.start_time_s) {}

StepOutcome ClosedLoop::step(const Setpoints& u) {
  const LoopConfig& cfg = *config_;
  const EnvStep es = env_step(history_.back(), u, cfg.env, t_, cfg.env.dt_s, noise_rng_);
  std::rotate(history_.begin(), history_.begin() + 1, history_.end());
  history_.back() = es.state;

  StepOutcome out;
  out.step = step_;
  out.t = t_;
  out.period = plant_.period;
  out.sex = plant_.sex;
  out.env = es.state;
  out.setpoints = u;
  out.cost = es.cost;

  const GsWeights& w = cfg.oracle.gs_weights;
  const double gs_before = gs_rule(plant_.period, plant_.morphology, w);
  PlantState next = model_->advance(plant_, history_, cfg.env.dt_s);
  out.morphology = next.morphology;
  out.gs = gs_rule(plant_.period, next.morphology, w);
  out.gs_increment = out.gs - gs_before;
  out.period_changed = next.period != plant_.period;
  out.reward = compute_reward(cfg.reward.gs_mode == GsMode::Increment ? out.gs_increment : out.gs,
                              out.cost, cfg.reward);

  plant_ = next;
  t_ += cfg.env.dt_s;
  ++step_;
  return out;
}

PlantState sow_episode(std::uint64_t seed, std::uint64_t episode, const OracleParams& oracle) {
  return sow(assign_sex(derive_seed(seed, Stream::Sex, episode), oracle.p_female));
}

}  // namespace medrl
