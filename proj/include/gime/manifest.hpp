#pragma once

// DatasetManifest binds dataset fields to metric roles: which column holds
// event times, which one scopes records, where labels live, and so on.
// Metrics whose bindings are absent are reported absent, not zero.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gime/error.hpp"
#include "gime/metric_types.hpp"

namespace gime {

enum class FieldKind : uint8_t { Text, Integer, Real, Timestamp, Boolean };

std::string_view field_kind_name(FieldKind k);
FieldKind field_kind_from_name(std::string_view name);

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::Text;
  bool operator==(const FieldSpec&) const = default;
};

// A span of time expressed in seconds. Named units: second, minute, hour,
// day, week, year (365.25 days), year365 (365 days). Custom spans are given
// directly in seconds.
struct TimeQuantity {
  double seconds = 1.0;
  std::string name = "second";

  bool operator==(const TimeQuantity&) const = default;

  static TimeQuantity from_unit_name(std::string_view unit);  // throws BadArgument
};

enum class DurationMode : uint8_t { Span, BucketUnion };

// How distortion is computed when no per-record error field exists: join
// against a reference file and compare a field value.
struct TruthReference {
  std::string path;
  std::string format;      // "csv" | "jsonl"
  std::string join_key;    // field in the dataset used to join
  std::string ref_id;      // field in the reference holding the join key
  std::string ref_field;   // reference field compared against compare_field
  std::string compare_field;  // dataset field compared against the reference
  bool numeric = false;    // numeric deviation instead of categorical equality
  bool operator==(const TruthReference&) const = default;
};

// Target label distribution for mismatch: a binary positive rate or a
// categorical distribution over label values (must sum to 1 within 1e-9).
struct MismatchTarget {
  bool binary = true;
  double positive_rate = 0.5;
  std::map<std::string, double> distribution;
  bool operator==(const MismatchTarget&) const = default;
};

struct DatasetManifest {
  std::vector<FieldSpec> schema;

  std::string record_id_field;
  std::optional<std::string> event_time_field;
  std::optional<std::string> collection_time_field;
  std::optional<std::string> scope_field;
  std::optional<double> scope_constant;
  std::optional<std::string> variety_field;
  std::optional<std::vector<std::string>> feature_list;
  std::optional<std::string> granularity_field;
  std::optional<double> granularity_constant;
  std::optional<std::string> aggregation_field;
  std::optional<std::string> coverage_field;
  std::optional<std::vector<std::string>> coverage_universe;
  std::optional<std::string> distortion_field;
  std::optional<TruthReference> truth_reference;
  std::optional<std::string> label_field;
  std::optional<MismatchTarget> mismatch_target;
  std::optional<TimeQuantity> nominal_sampling_interval;

  TimeQuantity time_unit;                 // unit for delay and duration
  TimeQuantity epoch_unit;                // unit of integer timestamp values
  DurationMode duration_mode = DurationMode::Span;
  std::optional<TimeQuantity> bucket_size;  // required for BucketUnion

  std::optional<size_t> field_index(const std::string& name) const;
  const FieldSpec* field(const std::string& name) const;

  // Stable digest over the canonical JSON form; partial metric states built
  // under different manifests refuse to merge.
  std::string digest() const;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
  static DatasetManifest load(const std::string& path);
};

struct ManifestIssue {
  enum class Severity : uint8_t { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  std::optional<MetricId> disabled_metric;
};

// Empty result means every binding resolves with a compatible kind. Optional
// bindings that are absent produce warnings naming the metric they disable.
std::vector<ManifestIssue> validate_manifest(const DatasetManifest& manifest);

}  // namespace gime
