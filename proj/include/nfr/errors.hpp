#pragma once

#include <stdexcept>
#include <string>

namespace nfr {

// Error taxonomy, mirrored by CLI exit codes:
//   UsageError / ConfigError -> 1, IntegrityError -> 2, NumericalError -> 3.

// Caller passed arguments that cannot be honored (bad ids, shapes at the API
// boundary, empty inputs, out-of-range pixels).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent configuration: parameter vector lengths, layer dimensions,
// latent sizes that do not match the declared specs.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corrupt or mismatched on-disk state (checkpoints, manifests, images).
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf detected in a forward or backward pass, or in gradients handed to
// the optimizer. Message names the offending operation.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nfr
