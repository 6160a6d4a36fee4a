#pragma once

#include <string>
#include <vector>

namespace sqzmode {

// Non-fatal findings collected by an operation (under-sized grids, mild
// spectral aliasing). Callers that do not care pass nullptr.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const noexcept { return warnings.empty(); }
};

}  // namespace sqzmode
