// SPDX-License-Identifier: Apache-2.0
// Mean path loss per season and carrier at a few distances, using the
// midpoint weather of each season in the bundled scenario.

#include <iomanip>
#include <iostream>

#include "mmwpl/mmwpl.hpp"

int main() {
  using namespace mmwpl;
  const ScenarioConfig cfg = default_scenario();
  auto mid = [](const Range& r) { return 0.5 * (r.min + r.max); };

  std::cout << std::left << std::setw(8) << "season" << std::setw(10) << "GHz" << std::right;
  for (double d : {10.0, 100.0, 500.0}) std::cout << std::setw(12) << ("PL@" + format_fixed(d, 0) + "m");
  std::cout << '\n';

  for (Season s : cfg.seasons) {
    const SeasonProfile& p = cfg.profile(s);
    const AtmosphericState weather{mid(p.temperature), mid(p.humidity), mid(p.pressure), mid(p.rain_rate)};
    for (double f : cfg.frequencies) {
      const double alpha = specific_attenuation(f, weather, cfg.atmosphere.coefficients, false).total_alpha;
      std::cout << std::left << std::setw(8) << season_name(s) << std::setw(10) << f << std::right;
      for (double d : {10.0, 100.0, 500.0})
        std::cout << std::setw(12) << format_fixed(ci_path_loss(f, d, cfg.channel, alpha, 0.0), 2);
      std::cout << '\n';
    }
  }
}
