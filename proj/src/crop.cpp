#include "medrl/crop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace medrl {

namespace {
constexpr double kSecondsPerDay = 86400.0;
}

std::string_view morphology_field_name(std::size_t i) {
  static constexpr std::array<std::string_view, Morphology::kSize> names = {
      "stem_length_cm", "leaf_count", "leaf_area_cm2", "flower_volume_cm3"};
  return i < names.size() ? names[i] : "?";
}

std::string_view period_name(GrowingPeriod p) {
  switch (p) {
    case GrowingPeriod::Germination: return "germination";
    case GrowingPeriod::Seedling: return "seedling";
    case GrowingPeriod::Mature: return "mature";
    case GrowingPeriod::Blooming: return "blooming";
  }
  return "?";
}

std::optional<GrowingPeriod> parse_period(std::string_view s) {
  for (GrowingPeriod p : kAllPeriods) {
    if (period_name(p) == s) return p;
  }
  return std::nullopt;
}

std::string_view sex_name(Sex s) {
  switch (s) {
    case Sex::Unknown: return "unknown";
    case Sex::Female: return "female";
    case Sex::Male: return "male";
  }
  return "?";
}

std::optional<Sex> parse_sex(std::string_view s) {
  for (Sex x : {Sex::Unknown, Sex::Female, Sex::Male}) {
    if (sex_name(x) == s) return x;
  }
  return std::nullopt;
}

PlantState sow(Sex latent_sex) {
  if (latent_sex == Sex::Unknown) throw std::invalid_argument("latent sex must be Female or Male");
  PlantState p;
  p.latent_sex = latent_sex;
  return p;
}

void OracleParams::validate() const {
  for (GrowingPeriod g : kAllPeriods) {
    const PeriodParams& pp = (*this)[g];
    const std::string name(period_name(g));
    for (double w : pp.width) {
      if (!(w > 0.0)) throw std::invalid_argument(name + ": suitability width must be > 0");
    }
    if (!(pp.r_stem_cm_per_day >= 0.0) || !(pp.r_flower_cm3_per_day >= 0.0) ||
        !(pp.lambda_leaf_per_cm >= 0.0) || !(pp.alpha_area_cm2 >= 0.0)) {
      throw std::invalid_argument(name + ": rates must be >= 0");
    }
    if (!(delta2_cm < pp.stem_max_cm)) {
      throw std::invalid_argument(name + ": delta2 must be < stem_max");
    }
  }
  if (!(delta1_cm > 0.0 && delta1_cm < delta2_cm)) {
    throw std::invalid_argument("need 0 < delta1 < delta2");
  }
  if (!(mature_duration_s >= 0.0)) throw std::invalid_argument("mature_duration must be >= 0");
  if (!(p_female >= 0.0 && p_female <= 1.0)) throw std::invalid_argument("p_female not in [0,1]");
  if (!(male_leaf_area_factor > 0.0)) {
    throw std::invalid_argument("male_leaf_area_factor must be > 0");
  }
}

OracleParams default_oracle_params() {
  OracleParams o;
  // optimum / width in Var order: temperature, humidity, light, co2
  o[GrowingPeriod::Germination] = {
      {27.0, 0.85, 300.0, 600.0}, {8.0, 0.25, 700.0, 800.0}, 40.0, 100.0, 0.5, 4.0, 0.0};
  o[GrowingPeriod::Seedling] = {
      {25.0, 0.70, 600.0, 900.0}, {8.0, 0.25, 600.0, 700.0}, 150.0, 100.0, 0.5, 6.0, 0.0};
  o[GrowingPeriod::Mature] = {
      {24.0, 0.60, 900.0, 1100.0}, {8.0, 0.25, 600.0, 700.0}, 60.0, 100.0, 0.5, 8.0, 0.0};
  o[GrowingPeriod::Blooming] = {
      {22.0, 0.50, 1100.0, 1000.0}, {8.0, 0.25, 600.0, 700.0}, 10.0, 100.0, 0.5, 8.0, 100.0};
  o.delta1_cm = 2.0;
  o.delta2_cm = 15.0;
  o.mature_duration_s = 21600.0;
  o.p_female = 0.5;
  o.male_leaf_area_factor = 0.8;
  return o;
}

double suitability(const EnvState& x, GrowingPeriod period, const OracleParams& params) {
  const PeriodParams& pp = params[period];
  double exponent = 0.0;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    const double z = (x.values[i] - pp.optimum[i]) / pp.width[i];
    exponent += z * z;
  }
  return std::exp(-0.5 * exponent);
}

double gs_rule(GrowingPeriod period, const Morphology& m, const GsWeights& w) {
  if (period == GrowingPeriod::Blooming) return m.flower_volume_cm3;
  return w.stem * m.stem_length_cm + w.leaf * m.leaf_count;
}

PlantState period_transition(PlantState p, const OracleParams& params) {
  const double stem = p.morphology.stem_length_cm;
  bool moved = false;
  switch (p.period) {
    case GrowingPeriod::Germination:
      if (stem >= params.delta1_cm) {
        p.period = GrowingPeriod::Seedling;
        moved = true;
      }
      break;
    case GrowingPeriod::Seedling:
      if (stem >= params.delta2_cm) {
        p.period = GrowingPeriod::Mature;
        p.sex = p.latent_sex;
        moved = true;
      }
      break;
    case GrowingPeriod::Mature:
      if (p.time_in_period_s >= params.mature_duration_s) {
        p.period = GrowingPeriod::Blooming;
        moved = true;
      }
      break;
    case GrowingPeriod::Blooming:
      break;
  }
  if (moved) p.time_in_period_s = 0.0;
  return p;
}

double leaf_area_for(const PlantState& p, double leaf_count, const OracleParams& params) {
  double area = params[p.period].alpha_area_cm2 * leaf_count;
  if (p.sex == Sex::Male) area *= params.male_leaf_area_factor;
  return area;
}

PlantState grow_step(const PlantState& p, const EnvState& x, double dt, const OracleParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const PeriodParams& pp = params[p.period];
  const double g = suitability(x, p.period, params);
  const double days = dt / kSecondsPerDay;

  PlantState next = p;
  Morphology& m = next.morphology;
  const double stem = p.morphology.stem_length_cm;
  const double d_stem = pp.r_stem_cm_per_day * g * days * (1.0 - stem / pp.stem_max_cm);
  m.stem_length_cm = stem + std::max(0.0, d_stem);
  m.leaf_count = std::floor(pp.lambda_leaf_per_cm * m.stem_length_cm);
  m.leaf_area_cm2 = leaf_area_for(p, m.leaf_count, params);
  if (p.period == GrowingPeriod::Blooming) {
    m.flower_volume_cm3 = p.morphology.flower_volume_cm3 + pp.r_flower_cm3_per_day * g * days;
  }
  next.age_s += dt;
  next.time_in_period_s += dt;
  return period_transition(next, params);
}

Sex assign_sex(std::uint64_t seed, double p_female) {
  if (!(p_female >= 0.0 && p_female <= 1.0)) throw std::invalid_argument("p_female not in [0,1]");
  Rng rng(seed);
  return uniform01(rng) < p_female ? Sex::Female : Sex::Male;
}

}  // namespace medrl
