// SPDX-License-Identifier: Apache-2.0
#pragma once

// Close-in (CI) free-space reference path loss with atmospheric excess loss,
// shadow fading, a simplified multipath generator and per-drop record
// synthesis.
//
//   PL(f, d) = FSPL(f) + 10 n log10(d) + alpha d + X     [dB], d >= 1 m
//   FSPL(f)  = 32.4 + 20 log10(f / GHz)                   [dB at 1 m]
//
// X is a zero-mean Gaussian shadow term with standard deviation shadow_sigma.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mmwpl/atmosphere.hpp"
#include "mmwpl/config.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/random.hpp"

namespace mmwpl {

/// The four carrier frequencies of the reference scenario, GHz.
inline constexpr std::array<double, 4> kCarrierFrequencies{7.125, 24.25, 52.60, 71.0};

inline constexpr double kFsplAt1GHz = 32.4;

struct LinkGeometry {
  double distance = 1.0;              // 3-D T-R separation, m
  double base_station_height = 32.0;  // m, metadata
  double user_height = 1.5;           // m, metadata
  double tx_power = 30.0;             // dBm
};

struct MultipathParams {
  int min_paths = 6;
  int max_paths = 18;
  double delay_scale = 50.0;  // ns, mean excess delay of non-first paths
  double power_decay = 0.02;  // dB per ns
};

struct ChannelModelParams {
  double path_loss_exponent = 3.2;
  double shadow_sigma = 8.0;  // dB
  bool human_blockage_enabled = true;
  double human_blockage_mean = 14.4;  // dB
  double human_blockage_probability = 0.2;
  bool foliage_enabled = false;
  MultipathParams multipath;
};

inline void validate(const ChannelModelParams& p) {
  if (!(p.path_loss_exponent > 0.0)) throw ValidationError("path_loss_exponent must be > 0");
  if (!(p.shadow_sigma >= 0.0)) throw ValidationError("shadow_sigma must be >= 0");
  if (!(p.human_blockage_mean >= 0.0)) throw ValidationError("human_blockage_mean must be >= 0");
  if (!(p.human_blockage_probability >= 0.0 && p.human_blockage_probability <= 1.0))
    throw ValidationError("human_blockage_probability must be in [0, 1]");
}

struct MultipathComponent {
  double delay = 0.0;           // ns, excess delay
  double relative_power = 0.0;  // dB relative to the strongest path
  double phase = 0.0;           // rad, [0, 2pi)
  double aod_azimuth = 0.0;     // deg, [0, 360)
  double aod_elevation = 0.0;   // deg, [-90, 90]
  double aoa_azimuth = 0.0;
  double aoa_elevation = 0.0;
};

/// One dataset row. Field order matches the CSV column order.
struct ChannelRecord {
  double t_r_separation = 0.0;  // m
  double time_delay = 0.0;      // ns
  double received_power = 0.0;  // dBm
  double phase = 0.0;           // rad
  double azimuth_aod = 0.0;     // deg
  double elevation_aod = 0.0;
  double azimuth_aoa = 0.0;
  double elevation_aoa = 0.0;
  double rms_delay_spread = 0.0;  // ns
  Season season = Season::Spring;
  double frequency = 0.0;  // GHz
  double path_loss = 0.0;  // dB

  bool operator==(const ChannelRecord&) const = default;
};

inline double fspl(double freq_ghz) {
  if (!(freq_ghz > 0.0)) throw DomainError("fspl: frequency must be > 0 GHz");
  return kFsplAt1GHz + 20.0 * std::log10(freq_ghz);
}

struct PathLossTerms {
  double fspl = 0.0;
  double distance_term = 0.0;  // 10 n log10(d)
  double atmospheric = 0.0;    // alpha d
  double shadow = 0.0;
  double total = 0.0;
};

inline PathLossTerms ci_path_loss_terms(double freq_ghz, double distance, double path_loss_exponent, double alpha,
                                        double shadow_draw) {
  if (!(distance >= 1.0)) throw DomainError("distance below the 1 m close-in reference");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0 dB/m");
  if (!(path_loss_exponent > 0.0)) throw DomainError("path loss exponent must be > 0");
  PathLossTerms t;
  t.fspl = fspl(freq_ghz);
  t.distance_term = 10.0 * path_loss_exponent * std::log10(distance);
  t.atmospheric = alpha * distance;
  t.shadow = shadow_draw;
  t.total = t.fspl + t.distance_term + t.atmospheric + t.shadow;
  return t;
}

inline double ci_path_loss(double freq_ghz, double distance, const ChannelModelParams& params, double alpha,
                           double shadow_draw) {
  return ci_path_loss_terms(freq_ghz, distance, params.path_loss_exponent, alpha, shadow_draw).total;
}

/// Power-weighted RMS spread of the excess delays, ns.
inline double rms_delay_spread(std::span<const MultipathComponent> components) {
  if (components.empty()) throw DomainError("rms_delay_spread: no components");
  // Powers relative to the strongest keep exp10 in range and make the result
  // invariant to a common dB offset.
  double ref = components[0].relative_power;
  for (const auto& c : components) ref = std::max(ref, c.relative_power);
  double p_sum = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& c : components) {
    const double p = std::pow(10.0, (c.relative_power - ref) / 10.0);
    p_sum += p;
    m1 += p * c.delay;
    m2 += p * c.delay * c.delay;
  }
  m1 /= p_sum;
  m2 /= p_sum;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

/// Draw one multipath realization.
///
/// Path count uniform in [min_paths, max_paths]; the first path arrives at
/// zero excess delay, the others after exponential delays of mean
/// delay_scale. Power falls off linearly in dB with delay, plus up to +/-3 dB
/// of uniform jitter, and is renormalized so the strongest path is 0 dB.
inline std::vector<MultipathComponent> sample_multipath(RandomStream& rng, const MultipathParams& mp) {
  if (mp.min_paths < 1 || mp.min_paths > mp.max_paths) throw DomainError("sample_multipath: invalid path count range");
  if (!(mp.delay_scale > 0.0)) throw DomainError("sample_multipath: delay_scale must be > 0");
  if (!(mp.power_decay >= 0.0)) throw DomainError("sample_multipath: power_decay must be >= 0");

  const auto n = static_cast<std::size_t>(rng.uniform_int(mp.min_paths, mp.max_paths));
  std::vector<MultipathComponent> paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = paths[i];
    c.delay = i == 0 ? 0.0 : rng.exponential(mp.delay_scale);
    c.relative_power = -mp.power_decay * c.delay + rng.uniform(-3.0, 3.0);
    c.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    c.aod_azimuth = rng.uniform(0.0, 360.0);
    c.aod_elevation = rng.uniform(-90.0, 90.0);
    c.aoa_azimuth = rng.uniform(0.0, 360.0);
    c.aoa_elevation = rng.uniform(-90.0, 90.0);
  }
  std::stable_sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a.delay < b.delay; });
  double strongest = paths[0].relative_power;
  for (const auto& c : paths) strongest = std::max(strongest, c.relative_power);
  for (auto& c : paths) c.relative_power -= strongest;
  return paths;
}

/// Everything one drop produced, kept for inspection and tests.
struct DropResult {
  AtmosphericState weather;
  AttenuationBreakdown attenuation;
  double shadow = 0.0;
  bool blocked = false;
  double path_loss = 0.0;  // dB, including blockage
  std::vector<MultipathComponent> paths;
  std::vector<ChannelRecord> records;
};

/// One placement: weather, shadow and blockage draws, multipath, records.
///
/// The random stream is consumed in a fixed pattern regardless of flags
/// (blockage draw and shadow draw always happen), so toggling blockage or
/// zeroing sigma leaves every other draw of the drop unchanged.
inline DropResult simulate_drop_detailed(const LinkGeometry& geometry, const ChannelModelParams& params, double freq_ghz,
                                         const SeasonProfile& season, const AttenuationCoefficients& coeffs,
                                         RandomStream& rng) {
  validate(params);
  DropResult d;
  d.weather = sample_atmosphere(season, rng);
  d.attenuation = specific_attenuation(freq_ghz, d.weather, coeffs, params.foliage_enabled);
  d.shadow = params.shadow_sigma * rng.normal();
  const bool blockage_draw = rng.bernoulli(params.human_blockage_probability);
  d.blocked = params.human_blockage_enabled && blockage_draw;
  d.path_loss = ci_path_loss(freq_ghz, geometry.distance, params, d.attenuation.total_alpha, d.shadow);
  if (d.blocked) d.path_loss += params.human_blockage_mean;
  d.paths = sample_multipath(rng, params.multipath);

  const double spread = rms_delay_spread(d.paths);
  const double strongest_rx = geometry.tx_power - d.path_loss;
  d.records.reserve(d.paths.size());
  for (const auto& c : d.paths) {
    ChannelRecord r;
    r.t_r_separation = geometry.distance;
    r.time_delay = c.delay;
    r.received_power = strongest_rx + c.relative_power;
    r.phase = c.phase;
    r.azimuth_aod = c.aod_azimuth;
    r.elevation_aod = c.aod_elevation;
    r.azimuth_aoa = c.aoa_azimuth;
    r.elevation_aoa = c.aoa_elevation;
    r.rms_delay_spread = spread;
    r.season = season.season;
    r.frequency = freq_ghz;
    r.path_loss = geometry.tx_power - strongest_rx;
    d.records.push_back(r);
  }
  return d;
}

inline std::vector<ChannelRecord> simulate_drop(const LinkGeometry& geometry, const ChannelModelParams& params,
                                                double freq_ghz, const SeasonProfile& season,
                                                const AttenuationCoefficients& coeffs, RandomStream& rng) {
  return simulate_drop_detailed(geometry, params, freq_ghz, season, coeffs, rng).records;
}

/// Full scenario: weather model, channel model and the sweep grid.
struct ScenarioConfig {
  AtmosphereConfig atmosphere;
  ChannelModelParams channel;
  LinkGeometry link;  // distance field unused; heights and tx power apply to every drop
  std::vector<double> frequencies{kCarrierFrequencies.begin(), kCarrierFrequencies.end()};
  std::vector<Season> seasons{kSeasons.begin(), kSeasons.end()};
  double dist_min = 10.0;
  double dist_max = 500.0;
  int dist_steps = 5;
  int drops = 3;
  std::uint64_t seed = 2023;

  /// Evenly spaced distances, inclusive of both ends.
  std::vector<double> distances() const {
    std::vector<double> d;
    if (dist_steps <= 0) return d;
    if (dist_steps == 1) return {dist_min};
    for (int i = 0; i < dist_steps; ++i)
      d.push_back(i == dist_steps - 1 ? dist_max
                                      : dist_min + (dist_max - dist_min) * static_cast<double>(i) / (dist_steps - 1));
    return d;
  }

  const SeasonProfile& profile(Season s) const { return atmosphere.seasons[static_cast<std::size_t>(s)]; }
};

inline void validate(const ScenarioConfig& c) {
  if (c.frequencies.empty() || c.seasons.empty() || c.dist_steps < 1 || c.drops < 1)
    throw ConfigError("empty scenario grid (need >= 1 frequency, season, distance and drop)");
  if (!(c.dist_min >= 1.0) || !(c.dist_max >= c.dist_min))
    throw ConfigError("distance range must satisfy 1 <= dist_min <= dist_max");
  validate(c.channel);
  for (double f : c.frequencies) (void)c.atmosphere.coefficients.lookup(f);
}

inline ScenarioConfig load_scenario(const config::Document& doc) {
  ScenarioConfig c;
  c.atmosphere = load_atmosphere(doc);
  if (const auto* s = doc.find("channel")) {
    auto& ch = c.channel;
    ch.path_loss_exponent = config::get_real(*s, "path_loss_exponent", ch.path_loss_exponent);
    ch.shadow_sigma = config::get_real(*s, "shadow_sigma", ch.shadow_sigma);
    ch.human_blockage_enabled = config::get_bool(*s, "human_blockage", ch.human_blockage_enabled);
    ch.human_blockage_mean = config::get_real(*s, "human_blockage_mean", ch.human_blockage_mean);
    ch.human_blockage_probability =
        config::get_real(*s, "human_blockage_probability", ch.human_blockage_probability);
    ch.foliage_enabled = config::get_bool(*s, "foliage", ch.foliage_enabled);
    c.link.tx_power = config::get_real(*s, "tx_power", c.link.tx_power);
    c.link.base_station_height = config::get_real(*s, "bs_height", c.link.base_station_height);
    c.link.user_height = config::get_real(*s, "ue_height", c.link.user_height);
  }
  if (const auto* s = doc.find("multipath")) {
    auto& mp = c.channel.multipath;
    if (auto r = config::get_unsigned_range(*s, "paths")) {
      if (r->second > 10000) throw ConfigError("'paths' maximum is too large", config::line_of(*s, "paths"));
      mp.min_paths = static_cast<int>(r->first);
      mp.max_paths = static_cast<int>(r->second);
    }
    mp.delay_scale = config::get_real(*s, "delay_scale", mp.delay_scale);
    mp.power_decay = config::get_real(*s, "power_decay", mp.power_decay);
  }
  if (const auto* s = doc.find("sweep")) {
    c.frequencies = config::get_reals(*s, "frequencies", c.frequencies);
    if (const auto* e = s->find("seasons")) {
      c.seasons.clear();
      for (const auto& name : config::split_list(e->value)) {
        auto season = parse_season(name);
        if (!season) throw ConfigError("unknown season '" + name + "'", e->line);
        c.seasons.push_back(*season);
      }
    }
    c.dist_min = config::get_real(*s, "dist_min", c.dist_min);
    c.dist_max = config::get_real(*s, "dist_max", c.dist_max);
    auto count = [&](const char* key, int fallback) {
      const auto v = config::get_unsigned(*s, key, static_cast<std::uint64_t>(fallback));
      if (v > 1000000) throw ConfigError(std::string("'") + key + "' is too large", config::line_of(*s, key));
      return static_cast<int>(v);
    };
    c.dist_steps = count("dist_steps", c.dist_steps);
    c.drops = count("drops", c.drops);
    c.seed = config::get_unsigned(*s, "seed", c.seed);
  }
  return c;
}

inline ScenarioConfig default_scenario() { return load_scenario(config::parse_string(std::string(kDefaultConfig))); }

/// Substream seed for one grid point.
inline std::uint64_t drop_seed(std::uint64_t master, Season season, double freq_ghz, std::size_t distance_index,
                               std::size_t drop_index) {
  return derive_seed(master, {static_cast<std::uint64_t>(season), std::bit_cast<std::uint64_t>(freq_ghz),
                              static_cast<std::uint64_t>(distance_index), static_cast<std::uint64_t>(drop_index)});
}

/// Simulate every (season, frequency, distance, drop) point.
///
/// Each point draws from its own substream, and results are concatenated in
/// canonical order (season, frequency, distance, drop, delay), so output is
/// identical for any thread count. threads == 0 uses the hardware
/// concurrency.
inline std::vector<ChannelRecord> sweep_scenario(const ScenarioConfig& cfg, unsigned threads = 1) {
  validate(cfg);
  const auto distances = cfg.distances();

  std::vector<Season> seasons = cfg.seasons;
  std::sort(seasons.begin(), seasons.end());
  seasons.erase(std::unique(seasons.begin(), seasons.end()), seasons.end());
  std::vector<double> freqs = cfg.frequencies;
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());

  const std::size_t n_drop = static_cast<std::size_t>(cfg.drops);
  const std::size_t n_dist = distances.size();
  const std::size_t n_freq = freqs.size();
  const std::size_t total = seasons.size() * n_freq * n_dist * n_drop;
  std::vector<std::vector<ChannelRecord>> per_point(total);

  auto run_point = [&](std::size_t idx) {
    std::size_t rest = idx;
    const std::size_t drop = rest % n_drop;
    rest /= n_drop;
    const std::size_t di = rest % n_dist;
    rest /= n_dist;
    const std::size_t fi = rest % n_freq;
    const Season season = seasons[rest / n_freq];
    RandomStream rng(drop_seed(cfg.seed, season, freqs[fi], di, drop));
    LinkGeometry g = cfg.link;
    g.distance = distances[di];
    per_point[idx] =
        simulate_drop(g, cfg.channel, freqs[fi], cfg.profile(season), cfg.atmosphere.coefficients, rng);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < total; i = next++) run_point(i);
        } catch (...) {
          errors[t] = std::current_exception();
          next = total;
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<ChannelRecord> out;
  std::size_t rows = 0;
  for (const auto& p : per_point) rows += p.size();
  out.reserve(rows);
  for (auto& p : per_point) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace mmwpl
