#pragma once

#include "isaacs/rng.hpp"

namespace isaacs {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace isaacs
