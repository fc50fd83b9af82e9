#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mir {

// Input violates a documented precondition (bad index, wrong set size, ...).
struct MalformedInputError : std::runtime_error {
  explicit MalformedInputError(const std::string& what) : std::runtime_error(what) {}
};

// The request is well-formed but exceeds the configured enumeration/DP budget.
// Deliberately not an approximation fallback: callers must shrink the instance.
struct ScaleRefusedError : std::runtime_error {
  explicit ScaleRefusedError(const std::string& what) : std::runtime_error(what) {}
};

// A randomized search exhausted its sample budget. Carries the best miss when
// one exists (an item set no sampled partition itemized).
struct SearchFailedError : std::runtime_error {
  explicit SearchFailedError(const std::string& what,
                             std::optional<std::uint64_t> witness_bits = std::nullopt)
      : std::runtime_error(what), witness(witness_bits) {}
  std::optional<std::uint64_t> witness;
};

// A checker's own precondition does not hold, so its verdict would be
// meaningless (e.g. the embedding's no-mixing requirement).
struct PreconditionFailedError : std::runtime_error {
  explicit PreconditionFailedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mir
