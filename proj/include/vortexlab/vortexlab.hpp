#pragma once
// Umbrella header.

#include "core.hpp"
#include "dynamics.hpp"
#include "models.hpp"
#include "smalleig.hpp"
#include "specfun.hpp"
#include "stability.hpp"
#include "sweep.hpp"
#include "verify.hpp"

namespace vortexlab {
inline constexpr const char* version = "1.0.0";
}
