// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fris {

// Effective channel vector vanished; the caller decides on a fallback.
struct DegenerateChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration would exceed the configured work bound.
struct InstanceTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration (unknown key, bad value, bad file).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fris
