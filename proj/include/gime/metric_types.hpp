#pragma once

// The 11 general information metrics and the value vector they form.
//
// Canonical metric order (used for every serialization and report):
//   volume, delay, scope, granularity, variety, duration, sampling_rate,
//   aggregation, coverage, distortion, mismatch

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gime/error.hpp"

namespace gime {

enum class MetricId : uint8_t {
  Volume = 0,
  Delay,
  Scope,
  Granularity,
  Variety,
  Duration,
  SamplingRate,
  Aggregation,
  Coverage,
  Distortion,
  Mismatch,
};

inline constexpr size_t kMetricCount = 11;

constexpr std::array<MetricId, kMetricCount> all_metrics() {
  return {MetricId::Volume,       MetricId::Delay,      MetricId::Scope,
          MetricId::Granularity,  MetricId::Variety,    MetricId::Duration,
          MetricId::SamplingRate, MetricId::Aggregation, MetricId::Coverage,
          MetricId::Distortion,   MetricId::Mismatch};
}

std::string_view metric_name(MetricId id);
MetricId metric_from_name(std::string_view name);  // throws BadArgument

// Behavior of a metric under subset formation.
enum class MetricTypeClass : uint8_t {
  Additive,
  MaximumType,
  MinimumType,
  MeanType,
};

std::string_view type_class_name(MetricTypeClass c);
MetricTypeClass type_class_from_name(std::string_view name);

// Default classification: volume/scope/variety/duration/aggregation/coverage
// are additive, delay is maximum-type, granularity/sampling_rate/distortion/
// mismatch are mean-type. Total and pure.
MetricTypeClass classify_default(MetricId id);

// Values for the 11 metrics. Absent is a first-class state, never encoded
// as zero: metrics whose bindings are missing simply stay unset.
class MetricVector {
 public:
  MetricVector() = default;

  bool present(MetricId id) const { return values_[index(id)].has_value(); }
  double get(MetricId id) const { return values_[index(id)].value(); }
  std::optional<double> maybe(MetricId id) const { return values_[index(id)]; }
  void set(MetricId id, double value) { values_[index(id)] = value; }
  void clear(MetricId id) { values_[index(id)].reset(); }

  // Range-violation messages, empty when the vector is well-formed:
  // volume/scope/variety integral and >= 0, delay/duration/sampling_rate/
  // distortion/mismatch >= 0, granularity > 0, aggregation in (0,1],
  // coverage in [0,1].
  std::vector<std::string> validate() const;

  bool operator==(const MetricVector& other) const = default;

 private:
  static size_t index(MetricId id) { return static_cast<size_t>(id); }
  std::array<std::optional<double>, kMetricCount> values_{};
};

// Unit annotation for reports. `time_unit_name` labels delay and duration.
std::string metric_unit(MetricId id, std::string_view time_unit_name);

// Canonical JSON (fixed key order, schema_version 1, absent -> null).
// Round-trips losslessly including absent markers.
std::string metric_vector_to_json(const MetricVector& v,
                                  std::string_view time_unit_name = "second",
                                  bool estimated = false);
MetricVector metric_vector_from_json(const std::string& text);

}  // namespace gime
