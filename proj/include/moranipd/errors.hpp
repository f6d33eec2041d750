#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace moranipd {

// Bad inputs: malformed files, out-of-range parameters, violated preconditions.
// The command line maps this to its own exit code so scripts can tell bad
// input apart from an internal failure.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A fixation run exceeded its step cap without reaching an absorbing state.
class StepCapError : public std::runtime_error {
 public:
  StepCapError(const std::string& what, std::uint64_t steps)
      : std::runtime_error(what), steps(steps) {}
  std::uint64_t steps;
};

}  // namespace moranipd
