// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seasonal weather profiles and the weather -> specific attenuation mapping.
//
// Specific attenuation is parametric:
//   rain [dB/km] = k * R^a                          (R: rain rate, mm/h)
//   gas  [dB/km] = max(0, g0 + gh * H + gt * (T - 20 C))
//   foliage [dB/m] = 0.4 when enabled, else 0
//   alpha [dB/m] = (gas + rain) / 1000 + foliage
// with (k, a, g0, gh, gt) tabulated per carrier frequency in the
// configuration file.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmwpl/config.hpp"
#include "mmwpl/default_config.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/random.hpp"

namespace mmwpl {

enum class Season { Spring, Summer, Fall, Winter };

/// Profile order used everywhere a full set of seasons is returned.
inline constexpr std::array<Season, 4> kSeasons{Season::Spring, Season::Summer, Season::Fall, Season::Winter};

constexpr std::string_view season_name(Season s) {
  switch (s) {
    case Season::Spring: return "Spring";
    case Season::Summer: return "Summer";
    case Season::Fall: return "Fall";
    case Season::Winter: return "Winter";
  }
  return "?";
}

inline std::optional<Season> parse_season(std::string_view name) {
  for (Season s : kSeasons)
    if (season_name(s) == name) return s;
  return std::nullopt;
}

inline constexpr double kReferenceTemperatureC = 20.0;
inline constexpr double kFoliageAttenuationDbPerM = 0.4;

struct Range {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const Range&) const = default;
};

struct AtmosphericState {
  double temperature = 20.0;  // deg C
  double humidity = 50.0;     // % relative
  double pressure = 1010.0;   // mbar
  double rain_rate = 0.0;     // mm/h

  bool operator==(const AtmosphericState&) const = default;
};

/// Global validation bounds (the simulation's admissible weather envelope).
struct AtmosphereBounds {
  Range temperature{13.0, 40.0};
  Range humidity{2.0, 100.0};
  Range pressure{1000.0, 1013.0};
  Range rain_rate{0.2, 10.5};
  // When false, bound violations are reported as warnings instead of errors.
  bool strict = true;
};

namespace detail {

inline void check_bound(std::vector<std::string>& out, bool strict, std::string_view field, double v,
                        const Range& r) {
  if (r.contains(v)) return;
  std::string msg = std::string(field) + " = " + std::to_string(v) + " outside bound [" + std::to_string(r.min) +
                    ", " + std::to_string(r.max) + "]";
  if (strict) throw ValidationError(msg);
  out.push_back(std::move(msg));
}

}  // namespace detail

/// Validate a weather state. Physical invariants (humidity in [0, 100],
/// rain >= 0, pressure > 0) always throw; configured bounds throw in strict
/// mode and are returned as warnings otherwise.
inline std::vector<std::string> validate(const AtmosphericState& s, const AtmosphereBounds& bounds = {}) {
  if (!std::isfinite(s.temperature) || !std::isfinite(s.humidity) || !std::isfinite(s.pressure) ||
      !std::isfinite(s.rain_rate))
    throw ValidationError("atmospheric state has non-finite field");
  if (s.humidity < 0.0 || s.humidity > 100.0) throw ValidationError("humidity outside [0, 100]");
  if (s.rain_rate < 0.0) throw ValidationError("rain_rate must be >= 0");
  if (s.pressure <= 0.0) throw ValidationError("pressure must be > 0");
  std::vector<std::string> warnings;
  detail::check_bound(warnings, bounds.strict, "temperature", s.temperature, bounds.temperature);
  detail::check_bound(warnings, bounds.strict, "humidity", s.humidity, bounds.humidity);
  detail::check_bound(warnings, bounds.strict, "pressure", s.pressure, bounds.pressure);
  detail::check_bound(warnings, bounds.strict, "rain_rate", s.rain_rate, bounds.rain_rate);
  return warnings;
}

struct SeasonProfile {
  Season season = Season::Spring;
  Range temperature;
  Range humidity;
  Range pressure;
  Range rain_rate;

  bool operator==(const SeasonProfile&) const = default;
};

/// Throws ValidationError naming the field and violated bound.
inline void validate(const SeasonProfile& p, const AtmosphereBounds& bounds = {}) {
  auto check = [&](std::string_view field, const Range& r, const Range& b) {
    const std::string where = std::string(season_name(p.season)) + " " + std::string(field);
    if (!(r.min <= r.max))
      throw ValidationError(where + ": min > max (" + std::to_string(r.min) + " > " + std::to_string(r.max) + ")");
    if (r.min < b.min)
      throw ValidationError(where + ": min " + std::to_string(r.min) + " below bound " + std::to_string(b.min));
    if (r.max > b.max)
      throw ValidationError(where + ": max " + std::to_string(r.max) + " above bound " + std::to_string(b.max));
  };
  check("temperature", p.temperature, bounds.temperature);
  check("humidity", p.humidity, bounds.humidity);
  check("pressure", p.pressure, bounds.pressure);
  check("rain_rate", p.rain_rate, bounds.rain_rate);
}

/// Each field drawn independently and uniformly from its profile range, in
/// field order temperature, humidity, pressure, rain rate.
inline AtmosphericState sample_atmosphere(const SeasonProfile& p, RandomStream& rng) {
  AtmosphericState s;
  s.temperature = rng.uniform(p.temperature.min, p.temperature.max);
  s.humidity = rng.uniform(p.humidity.min, p.humidity.max);
  s.pressure = rng.uniform(p.pressure.min, p.pressure.max);
  s.rain_rate = rng.uniform(p.rain_rate.min, p.rain_rate.max);
  return s;
}

/// Attenuation coefficients for one carrier frequency.
struct FrequencyCoefficients {
  double frequency = 0.0;        // GHz
  double rain_k = 0.0;           // dB/km at 1 mm/h
  double rain_a = 1.0;           // power-law exponent
  double gas_g0 = 0.0;           // dB/km
  double gas_humidity = 0.0;     // dB/km per % RH
  double gas_temperature = 0.0;  // dB/km per deg C above the reference

  bool operator==(const FrequencyCoefficients&) const = default;
};

class AttenuationCoefficients {
 public:
  AttenuationCoefficients() = default;
  explicit AttenuationCoefficients(std::vector<FrequencyCoefficients> entries, bool interpolate = false)
      : entries_(std::move(entries)), interpolate_(interpolate) {
    for (const auto& e : entries_) {
      if (!(e.frequency > 0.0)) throw ValidationError("coefficient frequency must be > 0");
      if (e.rain_k < 0.0) throw ValidationError("rain_k must be >= 0");
      if (!(e.rain_a > 0.0)) throw ValidationError("rain_a must be > 0");
      if (e.gas_g0 < 0.0) throw ValidationError("gas_g0 must be >= 0");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (entries_[i].frequency == entries_[i - 1].frequency)
        throw ValidationError("duplicate coefficient entry for " + std::to_string(entries_[i].frequency) + " GHz");
  }

  const std::vector<FrequencyCoefficients>& entries() const { return entries_; }
  bool interpolate() const { return interpolate_; }

  std::vector<double> frequencies() const {
    std::vector<double> f;
    for (const auto& e : entries_) f.push_back(e.frequency);
    return f;
  }

  /// Exact lookup (relative tolerance 1e-9), or log-frequency linear
  /// interpolation between neighbours when enabled. Never extrapolates.
  FrequencyCoefficients lookup(double freq) const {
    for (const auto& e : entries_)
      if (std::abs(e.frequency - freq) <= 1e-9 * std::max(1.0, freq)) return e;
    if (!interpolate_ || entries_.size() < 2 || !(freq > entries_.front().frequency) ||
        !(freq < entries_.back().frequency))
      throw UnsupportedFrequencyError(freq);
    auto hi = std::upper_bound(entries_.begin(), entries_.end(), freq,
                               [](double f, const auto& e) { return f < e.frequency; });
    auto lo = hi - 1;
    const double t = (std::log(freq) - std::log(lo->frequency)) / (std::log(hi->frequency) - std::log(lo->frequency));
    auto lerp = [t](double a, double b) { return a + t * (b - a); };
    return {freq,
            lerp(lo->rain_k, hi->rain_k),
            lerp(lo->rain_a, hi->rain_a),
            lerp(lo->gas_g0, hi->gas_g0),
            lerp(lo->gas_humidity, hi->gas_humidity),
            lerp(lo->gas_temperature, hi->gas_temperature)};
  }

 private:
  std::vector<FrequencyCoefficients> entries_;
  bool interpolate_ = false;
};

struct AttenuationBreakdown {
  double gas = 0.0;          // dB/km
  double rain = 0.0;         // dB/km
  double foliage = 0.0;      // dB/m
  double total_alpha = 0.0;  // dB/m
};

inline AttenuationBreakdown specific_attenuation(double freq_ghz, const AtmosphericState& state,
                                                 const AttenuationCoefficients& coeffs, bool foliage_enabled) {
  if (state.rain_rate < 0.0 || state.humidity < 0.0 || state.humidity > 100.0)
    throw ValidationError("invalid atmospheric state");
  const FrequencyCoefficients c = coeffs.lookup(freq_ghz);
  AttenuationBreakdown b;
  b.rain = state.rain_rate > 0.0 ? c.rain_k * std::pow(state.rain_rate, c.rain_a) : 0.0;
  b.gas = std::max(0.0, c.gas_g0 + c.gas_humidity * state.humidity +
                            c.gas_temperature * (state.temperature - kReferenceTemperatureC));
  b.foliage = foliage_enabled ? kFoliageAttenuationDbPerM : 0.0;
  b.total_alpha = (b.gas + b.rain) / 1000.0 + b.foliage;
  return b;
}

/// Weather half of a scenario configuration.
struct AtmosphereConfig {
  AtmosphereBounds bounds;
  std::array<SeasonProfile, 4> seasons;
  AttenuationCoefficients coefficients;
};

namespace detail {

inline Range range_or(const config::Section& s, const std::string& key, Range fallback) {
  auto r = config::get_range(s, key);
  return r ? Range{r->first, r->second} : fallback;
}

inline Range require_range(const config::Section& s, const std::string& key) {
  auto r = config::get_range(s, key);
  if (!r) throw ConfigError("season " + s.name + " missing '" + key + "'", s.line);
  return {r->first, r->second};
}

}  // namespace detail

/// Read the [bounds], [season <Name>] and [coefficients <GHz>] sections.
///
/// Exactly one section per season is required; profile ranges must be
/// ordered and within the bounds.
inline AtmosphereConfig load_atmosphere(const config::Document& doc) {
  AtmosphereConfig cfg;
  if (const auto* b = doc.find("bounds")) {
    cfg.bounds.temperature = detail::range_or(*b, "temperature", cfg.bounds.temperature);
    cfg.bounds.humidity = detail::range_or(*b, "humidity", cfg.bounds.humidity);
    cfg.bounds.pressure = detail::range_or(*b, "pressure", cfg.bounds.pressure);
    cfg.bounds.rain_rate = detail::range_or(*b, "rain_rate", cfg.bounds.rain_rate);
    cfg.bounds.strict = config::get_bool(*b, "strict", true);
  }

  std::array<bool, 4> seen{};
  for (const auto* s : doc.sections_of("season")) {
    auto season = parse_season(s->name);
    if (!season) throw ConfigError("unknown season '" + s->name + "'", s->line);
    const auto idx = static_cast<std::size_t>(*season);
    SeasonProfile p;
    p.season = *season;
    p.temperature = detail::require_range(*s, "temperature");
    p.humidity = detail::require_range(*s, "humidity");
    p.pressure = detail::require_range(*s, "pressure");
    p.rain_rate = detail::require_range(*s, "rain_rate");
    try {
      validate(p, cfg.bounds);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(s->line) + ": " + e.what());
    }
    cfg.seasons[idx] = p;
    seen[idx] = true;
  }
  for (Season s : kSeasons)
    if (!seen[static_cast<std::size_t>(s)]) throw ConfigError("missing season " + std::string(season_name(s)));

  bool interpolate = false;
  if (const auto* a = doc.find("attenuation")) interpolate = config::get_bool(*a, "interpolate", false);
  std::vector<FrequencyCoefficients> entries;
  for (const auto* s : doc.sections_of("coefficients")) {
    auto f = config::to_real(s->name);
    if (!f) throw ConfigError("coefficient section needs a frequency in GHz, got '" + s->name + "'", s->line);
    FrequencyCoefficients c;
    c.frequency = *f;
    c.rain_k = config::require_real(*s, "rain_k");
    c.rain_a = config::require_real(*s, "rain_a");
    c.gas_g0 = config::require_real(*s, "gas_g0");
    c.gas_humidity = config::get_real(*s, "gas_humidity", 0.0);
    c.gas_temperature = config::get_real(*s, "gas_temperature", 0.0);
    entries.push_back(c);
  }
  try {
    cfg.coefficients = AttenuationCoefficients(std::move(entries), interpolate);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

/// Season profiles in fixed order Spring, Summer, Fall, Winter. With no path
/// the bundled defaults are returned.
inline std::array<SeasonProfile, 4> load_season_profiles(const std::optional<std::string>& path = std::nullopt) {
  const auto doc = path ? config::parse_file(*path) : config::parse_string(std::string(kDefaultConfig));
  return load_atmosphere(doc).seasons;
}

}  // namespace mmwpl
