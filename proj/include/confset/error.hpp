#pragma once

#include <stdexcept>
#include <string>

namespace confset {

// Precondition / input violations. The CLI maps these to exit code 2;
// everything else derived from std::exception maps to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace confset
