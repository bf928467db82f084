#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "medrl/env.hpp"

namespace medrl {

/// Observable plant shape. leaf_count is integral but stored as double so the
/// four fields can be treated as one feature vector.
struct Morphology {
  double stem_length_cm = 0.0;
  double leaf_count = 0.0;
  double leaf_area_cm2 = 0.0;
  double flower_volume_cm3 = 0.0;

  static constexpr std::size_t kSize = 4;
  std::array<double, kSize> to_array() const {
    return {stem_length_cm, leaf_count, leaf_area_cm2, flower_volume_cm3};
  }
  static Morphology from_array(const std::array<double, kSize>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
  friend bool operator==(const Morphology&, const Morphology&) = default;
};

std::string_view morphology_field_name(std::size_t i);

enum class GrowingPeriod : std::uint8_t { Germination = 0, Seedling = 1, Mature = 2, Blooming = 3 };
inline constexpr std::size_t kNumPeriods = 4;
inline constexpr std::array<GrowingPeriod, kNumPeriods> kAllPeriods = {
    GrowingPeriod::Germination, GrowingPeriod::Seedling, GrowingPeriod::Mature,
    GrowingPeriod::Blooming};

inline std::size_t index_of(GrowingPeriod p) { return static_cast<std::size_t>(p); }
std::string_view period_name(GrowingPeriod p);
std::optional<GrowingPeriod> parse_period(std::string_view s);

enum class Sex : std::uint8_t { Unknown = 0, Female = 1, Male = 2 };
std::string_view sex_name(Sex s);
std::optional<Sex> parse_sex(std::string_view s);

struct PlantState {
  Morphology morphology{};
  GrowingPeriod period = GrowingPeriod::Germination;
  Sex sex = Sex::Unknown;
  double age_s = 0.0;
  double time_in_period_s = 0.0;
  /// Drawn at sowing, revealed on entering Mature.
  Sex latent_sex = Sex::Female;

  friend bool operator==(const PlantState&, const PlantState&) = default;
};

/// A freshly sown seed: zero morphology, Germination, sex hidden.
PlantState sow(Sex latent_sex);

struct PeriodParams {
  /// Suitability optimum and width per climate variable (Var order).
  std::array<double, kNumVars> optimum{};
  std::array<double, kNumVars> width{};
  double r_stem_cm_per_day = 0.0;
  double stem_max_cm = 100.0;
  double lambda_leaf_per_cm = 0.5;
  double alpha_area_cm2 = 4.0;
  double r_flower_cm3_per_day = 0.0;
};

struct GsWeights {
  double stem = 1.0;
  double leaf = 1.0;
};

struct OracleParams {
  std::array<PeriodParams, kNumPeriods> periods{};
  double delta1_cm = 2.0;
  double delta2_cm = 15.0;
  double mature_duration_s = 21600.0;
  double p_female = 0.5;
  /// Leaf area per leaf of male plants relative to female ones, applied once
  /// sex is known.
  double male_leaf_area_factor = 0.8;
  GsWeights gs_weights{};

  const PeriodParams& operator[](GrowingPeriod p) const { return periods[index_of(p)]; }
  PeriodParams& operator[](GrowingPeriod p) { return periods[index_of(p)]; }

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Time-compressed default crop: a full life cycle takes roughly one simulated
/// day at dt = 300 s.
OracleParams default_oracle_params();

/// Product of per-variable Gaussian responses, in (0, 1].
double suitability(const EnvState& x, GrowingPeriod period, const OracleParams& params);

/// The growth-situation scalar under the rule of `period`: weighted stem
/// length plus leaf count before bloom, flower volume during bloom.
double gs_rule(GrowingPeriod period, const Morphology& m, const GsWeights& w = {});

inline double growth_situation(const PlantState& p, const GsWeights& w = {}) {
  return gs_rule(p.period, p.morphology, w);
}

/// Applies at most one forward period change; reveals sex on entering Mature.
PlantState period_transition(PlantState p, const OracleParams& params);

/// Advances the plant by dt seconds under climate x, then applies
/// period_transition. Throws std::invalid_argument if dt <= 0.
PlantState grow_step(const PlantState& p, const EnvState& x, double dt, const OracleParams& params);

/// Leaf area implied by leaf count, period and (known) sex.
double leaf_area_for(const PlantState& p, double leaf_count, const OracleParams& params);

/// Bernoulli(p_female) draw from a generator seeded with `seed`.
Sex assign_sex(std::uint64_t seed, double p_female);

}  // namespace medrl
