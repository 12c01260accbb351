#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gime {

// Every recoverable failure in the library carries one of these codes so
// callers (CLI, bindings, tests) can branch without parsing message text.
enum class Errc {
  MissingField,
  TypeError,
  SizeExceedsPool,
  NegativeDelay,
  NonPositiveGranularity,
  ZeroSpan,
  JoinKeyMiss,
  UnknownLabel,
  ManifestMismatch,
  ManifestInvalid,
  DegenerateSweep,
  ConfoundedSweep,
  MissingPoolMetric,
  Infeasible,
  MaxItersExceeded,
  RepairStalled,
  EmptySubset,
  UnreachableLevel,
  NonIntegralVolume,
  IoError,
  BadArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(Errc code, std::string message, uint64_t row)
      : std::runtime_error(std::move(message)), code_(code), row_(row) {}

  Errc code() const noexcept { return code_; }
  std::optional<uint64_t> row() const noexcept { return row_; }

 private:
  Errc code_;
  std::optional<uint64_t> row_;
};

}  // namespace gime
