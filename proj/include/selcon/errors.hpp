#pragma once

#include <stdexcept>
#include <string>

namespace selcon {

// Thrown when a caller violates a documented precondition.
struct contract_violation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool ok, const char* what) {
  if (!ok) throw contract_violation(what);
}

}  // namespace selcon
