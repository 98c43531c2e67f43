#pragma once

// Umbrella header for the suskit library.

#include "suskit/branching.hpp"
#include "suskit/closedform.hpp"
#include "suskit/graph.hpp"
#include "suskit/kernel.hpp"
#include "suskit/nystrom.hpp"
#include "suskit/rng.hpp"
#include "suskit/spec_parse.hpp"
#include "suskit/typespace.hpp"

namespace suskit {
inline constexpr const char* kVersion = "0.1.0";
}
