#include "medrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace medrl {

std::string_view var_name(Var v) {
  switch (v) {
    case Var::Temperature: return "temperature_c";
    case Var::Humidity: return "humidity_rel";
    case Var::Light: return "light_ppfd";
    case Var::Co2: return "co2_ppm";
  }
  return "?";
}

EnvState clamp_physical(EnvState x) {
  for (std::size_t i = 0; i < kNumVars; ++i) {
    x.values[i] = std::clamp(x.values[i], PhysicalBounds::lo[i], PhysicalBounds::hi[i]);
  }
  return x;
}

bool satisfies_physical_bounds(const EnvState& x) {
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (!(x.values[i] >= PhysicalBounds::lo[i] && x.values[i] <= PhysicalBounds::hi[i])) {
      return false;
    }
  }
  return true;
}

void ActuatorParams::validate() const {
  for (Var v : kAllVars) {
    const VarActuator& a = (*this)[v];
    const std::string name(var_name(v));
    if (!(a.tau_actuator_s > 0.0)) throw std::invalid_argument(name + ": tau_actuator must be > 0");
    if (!(a.tau_outdoor_s > 0.0)) throw std::invalid_argument(name + ": tau_outdoor must be > 0");
    if (!(a.kappa >= 0.0)) throw std::invalid_argument(name + ": kappa must be >= 0");
    if (!(a.noise_sigma >= 0.0)) throw std::invalid_argument(name + ": noise_sigma must be >= 0");
    if (!(a.range_min < a.range_max)) {
      throw std::invalid_argument(name + ": range_min must be < range_max");
    }
  }
}

bool ActuatorParams::in_range(const Setpoints& u) const {
  for (Var v : kAllVars) {
    const VarActuator& a = (*this)[v];
    if (!(u[v] >= a.range_min && u[v] <= a.range_max)) return false;
  }
  return true;
}

double DayCycle::at(double t) const {
  return mean + amplitude * std::cos(2.0 * std::numbers::pi * (t - peak_time_s) / period_s);
}

EnvState outdoor_at(const OutdoorProfile& profile, double t) {
  EnvState x;
  x[Var::Temperature] = profile.temperature.at(t);
  x[Var::Humidity] = profile.humidity_rel;
  x[Var::Light] = profile.light.at(t);
  x[Var::Co2] = profile.co2_ppm;
  return clamp_physical(x);
}

EnvParams default_env_params() {
  EnvParams p;
  p.dt_s = 300.0;
  p.base_cost_per_step = 0.01;
  p.actuators[Var::Temperature] = {1800.0, 7200.0, 10.0, 35.0, 0.1, 0.0};
  p.actuators[Var::Humidity] = {1800.0, 7200.0, 0.3, 0.95, 4.0, 0.0};
  p.actuators[Var::Light] = {300.0, 7200.0, 0.0, 1200.0, 0.0025, 0.0};
  p.actuators[Var::Co2] = {600.0, 7200.0, 400.0, 1500.0, 0.002, 0.0};
  return p;
}

void check_stability(const ActuatorParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  for (Var v : kAllVars) {
    const VarActuator& a = params[v];
    if (dt / a.tau_actuator_s > 1.0 || dt / a.tau_outdoor_s > 1.0) {
      throw std::invalid_argument("dt " + std::to_string(dt) + " s exceeds a time constant of " +
                                  std::string(var_name(v)) + " (explicit Euler needs dt/tau <= 1)");
    }
  }
}

EnvStep env_step(const EnvState& x, const Setpoints& u, const EnvParams& params, double t,
                 double dt, Rng& rng) {
  check_stability(params.actuators, dt);
  if (!params.actuators.in_range(u)) {
    throw std::invalid_argument("setpoint outside actuator range");
  }
  const EnvState ambient = outdoor_at(params.outdoor, t);
  EnvStep out;
  out.cost = params.base_cost_per_step;
  for (Var v : kAllVars) {
    const VarActuator& a = params.actuators[v];
    const double actuation = (dt / a.tau_actuator_s) * (u[v] - x[v]);
    // 1/inf == 0 removes the coupling term when it is disabled.
    const double coupling = (dt / a.tau_outdoor_s) * (ambient[v] - x[v]);
    double next = x[v] + actuation + coupling;
    if (a.noise_sigma > 0.0) next += a.noise_sigma * std::sqrt(dt) * standard_normal(rng);
    out.state[v] = next;
    out.cost += a.kappa * std::abs(actuation);
  }
  out.state = clamp_physical(out.state);
  return out;
}

EnvState reset(const OutdoorProfile& profile, double t) { return outdoor_at(profile, t); }

void CostLedger::charge(double step_cost) {
  if (!(step_cost >= 0.0)) throw std::invalid_argument("step cost must be >= 0");
  accumulated_ += step_cost;
}

}  // namespace medrl
