#pragma once

#include <string>
#include <vector>

#include "hfe/scenario.hpp"

namespace hfe {

/// Names of the built-in scenarios, in listing order.
const std::vector<std::string>& builtin_names();

/// Builds a built-in scenario; throws DomainError for unknown names.
Scenario builtin_scenario(const std::string& name);

}  // namespace hfe
