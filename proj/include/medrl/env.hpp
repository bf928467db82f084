#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string_view>

#include "medrl/rng.hpp"

namespace medrl {

/// The four controlled climate variables, in the fixed order used by every
/// vector, feature layout and action grid in the project.
enum class Var : std::size_t { Temperature = 0, Humidity = 1, Light = 2, Co2 = 3 };

inline constexpr std::size_t kNumVars = 4;
inline constexpr std::array<Var, kNumVars> kAllVars = {Var::Temperature, Var::Humidity,
                                                      Var::Light, Var::Co2};

/// Field names as they appear in config files, CSV headers and wire messages.
std::string_view var_name(Var v);

/// Four values indexed by Var. Tagged so that a climate reading and a setpoint
/// vector cannot be mixed up.
template <class Tag>
struct VarVector {
  std::array<double, kNumVars> values{};

  double& operator[](Var v) { return values[static_cast<std::size_t>(v)]; }
  double operator[](Var v) const { return values[static_cast<std::size_t>(v)]; }

  double temperature_c() const { return (*this)[Var::Temperature]; }
  double humidity_rel() const { return (*this)[Var::Humidity]; }
  double light_ppfd() const { return (*this)[Var::Light]; }
  double co2_ppm() const { return (*this)[Var::Co2]; }

  static VarVector make(double temperature_c, double humidity_rel, double light_ppfd,
                        double co2_ppm) {
    return VarVector{{temperature_c, humidity_rel, light_ppfd, co2_ppm}};
  }

  friend bool operator==(const VarVector&, const VarVector&) = default;
};

/// Climate state: degC, relative humidity fraction, PPFD umol/m2/s, CO2 ppm.
using EnvState = VarVector<struct EnvStateTag>;
/// Target values emitted by the controller, same units as EnvState.
using Setpoints = VarVector<struct SetpointsTag>;

/// Hard physical bounds applied after every simulator step.
struct PhysicalBounds {
  static constexpr std::array<double, kNumVars> lo = {-20.0, 0.0, 0.0, 0.0};
  static constexpr std::array<double, kNumVars> hi = {
      60.0, 1.0, std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity()};
};

EnvState clamp_physical(EnvState x);
bool satisfies_physical_bounds(const EnvState& x);

inline constexpr double kNoCoupling = std::numeric_limits<double>::infinity();

struct VarActuator {
  double tau_actuator_s = 1800.0;
  /// Outdoor-coupling time constant; kNoCoupling disables the coupling term.
  double tau_outdoor_s = 7200.0;
  double range_min = 0.0;
  double range_max = 1.0;
  /// Cost per unit of actuation-induced change in the variable.
  double kappa = 0.0;
  double noise_sigma = 0.0;
};

struct ActuatorParams {
  std::array<VarActuator, kNumVars> vars{};

  VarActuator& operator[](Var v) { return vars[static_cast<std::size_t>(v)]; }
  const VarActuator& operator[](Var v) const { return vars[static_cast<std::size_t>(v)]; }

  /// Throws std::invalid_argument if any actuator violates its invariants.
  void validate() const;
  bool in_range(const Setpoints& u) const;
};

/// mean + amplitude * cos(2*pi*(t - peak_time_s) / period_s)
struct DayCycle {
  double mean = 0.0;
  double amplitude = 0.0;
  double peak_time_s = 0.0;
  double period_s = 86400.0;

  double at(double t) const;
};

/// Ambient conditions. Temperature and light follow a day cycle, humidity and
/// CO2 are constant.
struct OutdoorProfile {
  DayCycle temperature{15.0, 10.0, 0.0, 86400.0};
  DayCycle light{300.0, 600.0, 0.0, 86400.0};
  double humidity_rel = 0.6;
  double co2_ppm = 420.0;
};

/// Ambient state at time t (seconds, t >= 0), clamped to physical bounds.
EnvState outdoor_at(const OutdoorProfile& profile, double t);

struct EnvParams {
  ActuatorParams actuators{};
  OutdoorProfile outdoor{};
  double dt_s = 300.0;
  /// Standing cost of sensors and cameras, charged every step.
  double base_cost_per_step = 0.0;
};

/// Default greenhouse: dt 300 s; see README for the table.
EnvParams default_env_params();

/// Throws std::invalid_argument unless dt > 0 and dt/tau <= 1 for every
/// actuator and coupling time constant.
void check_stability(const ActuatorParams& params, double dt);

struct EnvStep {
  EnvState state;
  double cost = 0.0;
};

/// One explicit-Euler step of the first-order actuator and outdoor-coupling
/// model. Draws from `rng` only for variables with noise_sigma > 0.
/// Throws std::invalid_argument for an unstable dt or an out-of-range setpoint.
EnvStep env_step(const EnvState& x, const Setpoints& u, const EnvParams& params, double t,
                 double dt, Rng& rng);

/// Initial climate: the outdoor ambient at t.
EnvState reset(const OutdoorProfile& profile, double t = 0.0);

/// Running total of step costs over a run.
class CostLedger {
 public:
  explicit CostLedger(double base_cost_per_step = 0.0) : base_(base_cost_per_step) {}

  void charge(double step_cost);
  double base_cost_per_step() const { return base_; }
  double accumulated() const { return accumulated_; }

 private:
  double base_;
  double accumulated_ = 0.0;
};

}  // namespace medrl
