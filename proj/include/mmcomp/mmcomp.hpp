#pragma once

#include "mmcomp/closed_form.hpp"
#include "mmcomp/config.hpp"
#include "mmcomp/depths.hpp"
#include "mmcomp/expm.hpp"
#include "mmcomp/harness.hpp"
#include "mmcomp/hjb_euler.hpp"
#include "mmcomp/model.hpp"
#include "mmcomp/rng.hpp"
#include "mmcomp/sim.hpp"
#include "mmcomp/stats.hpp"
#include "mmcomp/strategy.hpp"
#include "mmcomp/value_table.hpp"

namespace mmcomp {
inline constexpr const char* kVersion = "0.1.0";
}
