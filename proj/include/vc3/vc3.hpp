// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vc3/analysis/compander.hpp"
#include "vc3/analysis/sampling.hpp"
#include "vc3/analysis/split.hpp"
#include "vc3/analysis/stats.hpp"
#include "vc3/analysis/studies.hpp"
#include "vc3/bench/bench.hpp"
#include "vc3/bit_layout.hpp"
#include "vc3/codec.hpp"
#include "vc3/error.hpp"
#include "vc3/io/stream.hpp"
#include "vc3/precision.hpp"
