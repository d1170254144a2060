#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "impdde/model.hpp"

namespace impdde::cases {

// Built-in configurations: "example56" (periodic impulses, one saturating
// term with a distributed delay and harvesting) and "example1" (linear
// equation with unit jumps delta = -1, no positive almost periodic solution).
std::vector<std::string> names();

// JSON text of a built-in case. Throws ConfigError for unknown names.
std::string_view config_text(std::string_view name);

ModelSpec load(std::string_view name, const BoundOptions& options = {});

}  // namespace impdde::cases
