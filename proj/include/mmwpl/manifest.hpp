// SPDX-License-Identifier: Apache-2.0
#pragma once

// Run manifests and scenario rendering. A manifest is written next to every
// output and holds the fully resolved configuration, so a run can be
// repeated from it alone.

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mmwpl/atmosphere.hpp"
#include "mmwpl/channel.hpp"
#include "mmwpl/error.hpp"

namespace mmwpl {

inline constexpr std::string_view kVersion = "0.1.0";

namespace detail {
inline std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}
}  // namespace detail

/// Scenario configuration back in the key-value grammar; parsing the result
/// yields an identical ScenarioConfig.
inline std::string render_scenario(const ScenarioConfig& c) {
  using detail::shortest;
  std::ostringstream os;
  auto range = [&](const char* key, const Range& r) { os << key << " = " << shortest(r.min) << ", " << shortest(r.max) << '\n'; };
  const auto& b = c.atmosphere.bounds;
  os << "version = " << config::kFormatVersion << "\n\n[bounds]\n";
  range("temperature", b.temperature);
  range("humidity", b.humidity);
  range("pressure", b.pressure);
  range("rain_rate", b.rain_rate);
  os << "strict = " << (b.strict ? "true" : "false") << '\n';
  for (const auto& p : c.atmosphere.seasons) {
    os << "\n[season " << season_name(p.season) << "]\n";
    range("temperature", p.temperature);
    range("humidity", p.humidity);
    range("pressure", p.pressure);
    range("rain_rate", p.rain_rate);
  }
  os << "\n[attenuation]\ninterpolate = " << (c.atmosphere.coefficients.interpolate() ? "true" : "false") << '\n';
  for (const auto& e : c.atmosphere.coefficients.entries()) {
    os << "\n[coefficients " << shortest(e.frequency) << "]\n"
       << "rain_k = " << shortest(e.rain_k) << "\nrain_a = " << shortest(e.rain_a) << "\ngas_g0 = " << shortest(e.gas_g0)
       << "\ngas_humidity = " << shortest(e.gas_humidity) << "\ngas_temperature = " << shortest(e.gas_temperature)
       << '\n';
  }
  const auto& ch = c.channel;
  os << "\n[channel]\npath_loss_exponent = " << shortest(ch.path_loss_exponent)
     << "\nshadow_sigma = " << shortest(ch.shadow_sigma)
     << "\nhuman_blockage = " << (ch.human_blockage_enabled ? "true" : "false")
     << "\nhuman_blockage_mean = " << shortest(ch.human_blockage_mean)
     << "\nhuman_blockage_probability = " << shortest(ch.human_blockage_probability)
     << "\nfoliage = " << (ch.foliage_enabled ? "true" : "false") << "\ntx_power = " << shortest(c.link.tx_power)
     << "\nbs_height = " << shortest(c.link.base_station_height) << "\nue_height = " << shortest(c.link.user_height)
     << '\n';
  os << "\n[multipath]\npaths = " << ch.multipath.min_paths << ", " << ch.multipath.max_paths
     << "\ndelay_scale = " << shortest(ch.multipath.delay_scale) << "\npower_decay = " << shortest(ch.multipath.power_decay)
     << '\n';
  os << "\n[sweep]\nfrequencies = ";
  for (std::size_t i = 0; i < c.frequencies.size(); ++i) os << (i ? ", " : "") << shortest(c.frequencies[i]);
  os << "\nseasons = ";
  for (std::size_t i = 0; i < c.seasons.size(); ++i) os << (i ? ", " : "") << season_name(c.seasons[i]);
  os << "\ndist_min = " << shortest(c.dist_min) << "\ndist_max = " << shortest(c.dist_max)
     << "\ndist_steps = " << c.dist_steps << "\ndrops = " << c.drops << "\nseed = " << c.seed << '\n';
  return os.str();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Manifest skeleton; callers add "config", "inputs" and "outputs".
inline nlohmann::json make_manifest(std::string_view command, std::uint64_t seed) {
  return nlohmann::json{{"tool", "mmwpl"},
                        {"version", kVersion},
                        {"command", command},
                        {"seed", seed},
                        {"created_utc", utc_timestamp()}};
}

inline void write_manifest(const nlohmann::json& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << m.dump(2) << '\n';
}

inline nlohmann::json read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  try {
    nlohmann::json m;
    in >> m;
    if (m.value("tool", "") != "mmwpl") throw ParseError("'" + path + "' is not an mmwpl manifest");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed manifest '" + path + "': " + e.what());
  }
}

}  // namespace mmwpl
