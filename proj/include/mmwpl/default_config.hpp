// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace mmwpl {

// Bundled scenario configuration, identical to config/default.conf.
inline constexpr std::string_view kDefaultConfig = R"conf(# Default scenario: urban microcell, NLOS, four seasons, four carriers.
# Keep in sync with include/mmwpl/default_config.hpp (checked by the test suite).
version = 1

# Admissible weather envelope. Season ranges must lie inside it.
[bounds]
temperature = 13, 40
humidity = 2, 100
pressure = 1000, 1013
rain_rate = 0.2, 10.5
strict = true

# Seasonal sampling ranges, South Asian monsoon climate (Dhaka-like).
# Editorial values chosen inside the bounds above; their union covers them.
[season Spring]
temperature = 22, 40
humidity = 40, 85
pressure = 1003, 1010
rain_rate = 0.2, 5.0

[season Summer]
temperature = 26, 34
humidity = 70, 100
pressure = 1000, 1005
rain_rate = 3.0, 10.5

[season Fall]
temperature = 20, 33
humidity = 55, 95
pressure = 1004, 1011
rain_rate = 0.5, 6.0

[season Winter]
temperature = 13, 27
humidity = 2, 70
pressure = 1009, 1013
rain_rate = 0.2, 1.0

# Rain: k, a approximated from the ITU-R P.838-3 horizontal polarization
# table, log-interpolated to each carrier and rounded.
# Gas: linearized sea-level fit around ITU-R P.676 (dry air + water vapour).
# gas_g0 is the dry-air term, gas_humidity the water-vapour slope per % RH at
# ~20 C, gas_temperature the slope per deg C above 20 C.
[attenuation]
interpolate = false

[coefficients 7.125]
rain_k = 0.00212
rain_a = 1.469
gas_g0 = 0.007
gas_humidity = 0.0001
gas_temperature = -0.00005

[coefficients 24.25]
rain_k = 0.1459
rain_a = 1.007
gas_g0 = 0.015
gas_humidity = 0.0038
gas_temperature = -0.001

[coefficients 52.6]
rain_k = 0.70
rain_a = 0.80
gas_g0 = 1.5
gas_humidity = 0.0017
gas_temperature = -0.015

[coefficients 71]
rain_k = 1.04
rain_a = 0.735
gas_g0 = 0.22
gas_humidity = 0.005
gas_temperature = -0.003

# Large-scale channel. path_loss_exponent and shadow_sigma are typical UMi
# NLOS literature values, not measured ground truth.
[channel]
path_loss_exponent = 3.2
shadow_sigma = 8.0
human_blockage = true
human_blockage_mean = 14.4
human_blockage_probability = 0.2
foliage = false
tx_power = 30
bs_height = 32
ue_height = 1.5

# Simplified multipath generator. A drop carries 6 to 18 components, so
# several rows share each drop's path loss.
[multipath]
paths = 6, 18
delay_scale = 50
power_decay = 0.02

# Sweep grid. 5 distances x 4 carriers x 4 seasons x 3 drops x ~12 paths
# gives ~2880 rows.
[sweep]
frequencies = 7.125, 24.25, 52.6, 71
seasons = Spring, Summer, Fall, Winter
dist_min = 10
dist_max = 500
dist_steps = 5
drops = 3
seed = 2023
)conf";

}  // namespace mmwpl
