#pragma once

// Per-metric pass criteria, sensitivity profiles, and the policy that turns
// a profile plus pool metrics into a threshold spec.
//
// EqualPoolOptimal reads "at least as good as the pool, within tolerance":
// higher-better metrics must reach the pool value, lower-better metrics must
// not exceed it. A pool in its optimal state (delay 0, distortion 0) thereby
// forces candidates to match the optimum, and any pool satisfies its own
// derived spec.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "gime/error.hpp"
#include "gime/metric_types.hpp"

namespace gime {

enum class MeritDirection : uint8_t { HigherBetter, LowerBetter };

// Default directions: delay/distortion/mismatch are lower-better, the rest
// higher-better.
MeritDirection default_direction(MetricId id);

struct Criterion {
  enum class Kind : uint8_t { EqualPoolOptimal, Range, AtLeast, AtMost, Ignore };
  Kind kind = Kind::Ignore;
  double tolerance = 0;  // EqualPoolOptimal: absolute tolerance
  double lo = 0, hi = 0;  // Range
  double value = 0;       // AtLeast / AtMost

  static Criterion equal_pool_optimal(double tolerance = 0);
  static Criterion range(double lo, double hi);  // throws BadArgument if lo > hi
  static Criterion at_least(double x);
  static Criterion at_most(double x);
  static Criterion ignore();

  bool operator==(const Criterion&) const = default;
};

struct ThresholdSpec {
  std::array<Criterion, kMetricCount> criteria{};
  std::array<MeritDirection, kMetricCount> directions{};

  ThresholdSpec();

  const Criterion& criterion(MetricId id) const {
    return criteria[static_cast<size_t>(id)];
  }
  void set_criterion(MetricId id, Criterion c) {
    criteria[static_cast<size_t>(id)] = c;
  }
  MeritDirection direction(MetricId id) const {
    return directions[static_cast<size_t>(id)];
  }
  void set_direction(MetricId id, MeritDirection d) {
    directions[static_cast<size_t>(id)] = d;
  }

  std::string to_json() const;
  static ThresholdSpec from_json(const std::string& text);
  static ThresholdSpec load(const std::string& path);
};

enum class SensitivityLevel : uint8_t { High, Moderate, Low };

std::string_view sensitivity_level_name(SensitivityLevel level);
SensitivityLevel sensitivity_level_from_name(std::string_view name);

struct SensitivityEntry {
  SensitivityLevel level = SensitivityLevel::Low;
  bool fitted = false;                 // false: manual assignment
  std::optional<double> correlation;   // present when fitted, in [-1, 1]
};

struct SensitivityProfile {
  std::array<SensitivityEntry, kMetricCount> entries{};

  const SensitivityEntry& entry(MetricId id) const {
    return entries[static_cast<size_t>(id)];
  }
  void set(MetricId id, SensitivityEntry e) {
    entries[static_cast<size_t>(id)] = e;
  }

  std::string to_json() const;
  static SensitivityProfile from_json(const std::string& text);
  static SensitivityProfile load(const std::string& path);
};

// How derive_thresholds maps sensitivity levels onto criteria.
struct ThresholdPolicy {
  double count_tolerance = 0;        // EqualPoolOptimal tolerance, count metrics
  double real_tolerance_rel = 1e-6;  // relative tolerance for real metrics
  double moderate_lo_frac = 0.25;    // default moderate range, fraction of pool
  double moderate_hi_frac = 0.75;

  struct ModerateOverride {
    enum class Kind : uint8_t { RangeFrac, AtLeastFrac, AtLeastValue, AtMostValue };
    Kind kind = Kind::RangeFrac;
    double a = 0.25, b = 0.75;  // fractions or values, by kind
  };
  std::map<MetricId, ModerateOverride> moderate_overrides;
  std::map<MetricId, double> tolerance_overrides;  // absolute, per metric

  std::string to_json() const;
  static ThresholdPolicy from_json(const std::string& text);
  static ThresholdPolicy load(const std::string& path);
};

bool metric_is_count(MetricId id);  // volume/scope/variety

// High -> EqualPoolOptimal, Moderate -> policy-shaped bound, Low -> Ignore.
// Throws MissingPoolMetric when a non-Low metric is absent from the pool.
ThresholdSpec derive_thresholds(const SensitivityProfile& profile,
                                const MetricVector& pool,
                                const ThresholdPolicy& policy = {});

}  // namespace gime
