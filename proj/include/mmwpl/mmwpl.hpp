// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmwpl/atmosphere.hpp"
#include "mmwpl/channel.hpp"
#include "mmwpl/config.hpp"
#include "mmwpl/dataset.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/manifest.hpp"
#include "mmwpl/random.hpp"
#include "mmwpl/regression/benchmark.hpp"
#include "mmwpl/regression/metrics.hpp"
#include "mmwpl/regression/model.hpp"
#include "mmwpl/report.hpp"
