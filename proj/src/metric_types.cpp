#include "gime/metric_types.hpp"

#include <cmath>

#include <json.hpp>

namespace gime {

namespace {
constexpr std::array<std::string_view, kMetricCount> kNames = {
    "volume",        "delay",       "scope",    "granularity",
    "variety",       "duration",    "sampling_rate", "aggregation",
    "coverage",      "distortion",  "mismatch"};
}  // namespace

std::string_view metric_name(MetricId id) {
  return kNames[static_cast<size_t>(id)];
}

MetricId metric_from_name(std::string_view name) {
  for (size_t i = 0; i < kMetricCount; ++i) {
    if (kNames[i] == name) return static_cast<MetricId>(i);
  }
  throw Error(Errc::BadArgument, "unknown metric name: " + std::string(name));
}

std::string_view type_class_name(MetricTypeClass c) {
  switch (c) {
    case MetricTypeClass::Additive: return "additive";
    case MetricTypeClass::MaximumType: return "maximum";
    case MetricTypeClass::MinimumType: return "minimum";
    case MetricTypeClass::MeanType: return "mean";
  }
  return "additive";
}

MetricTypeClass type_class_from_name(std::string_view name) {
  if (name == "additive") return MetricTypeClass::Additive;
  if (name == "maximum") return MetricTypeClass::MaximumType;
  if (name == "minimum") return MetricTypeClass::MinimumType;
  if (name == "mean") return MetricTypeClass::MeanType;
  throw Error(Errc::BadArgument, "unknown type class: " + std::string(name));
}

MetricTypeClass classify_default(MetricId id) {
  switch (id) {
    case MetricId::Volume:
    case MetricId::Scope:
    case MetricId::Variety:
    case MetricId::Duration:
    case MetricId::Aggregation:
    case MetricId::Coverage:
      return MetricTypeClass::Additive;
    case MetricId::Delay:
      return MetricTypeClass::MaximumType;
    case MetricId::Granularity:
    case MetricId::SamplingRate:
    case MetricId::Distortion:
    case MetricId::Mismatch:
      return MetricTypeClass::MeanType;
  }
  return MetricTypeClass::Additive;
}

std::vector<std::string> MetricVector::validate() const {
  std::vector<std::string> issues;
  auto check = [&](MetricId id, bool ok, const char* what) {
    if (present(id) && !ok) {
      issues.push_back(std::string(metric_name(id)) + ": " + what);
    }
  };
  auto integral = [&](MetricId id) {
    return !present(id) ||
           (get(id) >= 0 && std::floor(get(id)) == get(id));
  };
  check(MetricId::Volume, integral(MetricId::Volume),
        "must be a non-negative integer count");
  check(MetricId::Scope, integral(MetricId::Scope),
        "must be a non-negative integer count");
  check(MetricId::Variety, integral(MetricId::Variety),
        "must be a non-negative integer count");
  check(MetricId::Delay, !present(MetricId::Delay) || get(MetricId::Delay) >= 0,
        "must be >= 0");
  check(MetricId::Duration,
        !present(MetricId::Duration) || get(MetricId::Duration) >= 0,
        "must be >= 0");
  check(MetricId::Granularity,
        !present(MetricId::Granularity) || get(MetricId::Granularity) > 0,
        "must be > 0");
  check(MetricId::SamplingRate,
        !present(MetricId::SamplingRate) || get(MetricId::SamplingRate) >= 0,
        "must be >= 0");
  check(MetricId::Aggregation,
        !present(MetricId::Aggregation) ||
            (get(MetricId::Aggregation) > 0 && get(MetricId::Aggregation) <= 1),
        "must lie in (0, 1]");
  check(MetricId::Coverage,
        !present(MetricId::Coverage) ||
            (get(MetricId::Coverage) >= 0 && get(MetricId::Coverage) <= 1),
        "must lie in [0, 1]");
  check(MetricId::Distortion,
        !present(MetricId::Distortion) || get(MetricId::Distortion) >= 0,
        "must be >= 0");
  check(MetricId::Mismatch,
        !present(MetricId::Mismatch) || get(MetricId::Mismatch) >= 0,
        "must be >= 0");
  return issues;
}

std::string metric_unit(MetricId id, std::string_view time_unit_name) {
  switch (id) {
    case MetricId::Volume: return "records";
    case MetricId::Delay:
    case MetricId::Duration: return std::string(time_unit_name);
    case MetricId::Scope:
    case MetricId::Variety: return "count";
    case MetricId::Granularity: return "resolution";
    default: return "dimensionless";
  }
}

namespace {
// Counts are emitted as JSON integers, everything else as doubles.
bool emit_as_integer(MetricId id, double v) {
  switch (id) {
    case MetricId::Volume:
    case MetricId::Scope:
    case MetricId::Variety:
      return std::floor(v) == v && std::abs(v) < 9.0e15;
    default:
      return false;
  }
}
}  // namespace

std::string metric_vector_to_json(const MetricVector& v,
                                  std::string_view time_unit_name,
                                  bool estimated) {
  nlohmann::ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "metric_vector";
  nlohmann::ordered_json metrics;
  nlohmann::ordered_json units;
  for (MetricId id : all_metrics()) {
    const auto key = std::string(metric_name(id));
    if (v.present(id)) {
      const double value = v.get(id);
      if (emit_as_integer(id, value)) {
        metrics[key] = static_cast<int64_t>(value);
      } else {
        metrics[key] = value;
      }
    } else {
      metrics[key] = nullptr;
    }
    units[key] = metric_unit(id, time_unit_name);
  }
  out["metrics"] = std::move(metrics);
  out["units"] = std::move(units);
  out["estimated"] = estimated;
  return out.dump(2);
}

MetricVector metric_vector_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadArgument,
                std::string("metric vector JSON parse failure: ") + e.what());
  }
  if (!parsed.contains("metrics") || !parsed["metrics"].is_object()) {
    throw Error(Errc::BadArgument, "metric vector JSON missing \"metrics\"");
  }
  MetricVector v;
  for (MetricId id : all_metrics()) {
    const auto key = std::string(metric_name(id));
    if (!parsed["metrics"].contains(key)) continue;
    const auto& cell = parsed["metrics"][key];
    if (cell.is_null()) continue;
    if (!cell.is_number()) {
      throw Error(Errc::BadArgument, "metric " + key + " must be a number or null");
    }
    v.set(id, cell.get<double>());
  }
  return v;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::TypeError: return "TypeError";
    case Errc::SizeExceedsPool: return "SizeExceedsPool";
    case Errc::NegativeDelay: return "NegativeDelay";
    case Errc::NonPositiveGranularity: return "NonPositiveGranularity";
    case Errc::ZeroSpan: return "ZeroSpan";
    case Errc::JoinKeyMiss: return "JoinKeyMiss";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::ManifestMismatch: return "ManifestMismatch";
    case Errc::ManifestInvalid: return "ManifestInvalid";
    case Errc::DegenerateSweep: return "DegenerateSweep";
    case Errc::ConfoundedSweep: return "ConfoundedSweep";
    case Errc::MissingPoolMetric: return "MissingPoolMetric";
    case Errc::Infeasible: return "Infeasible";
    case Errc::MaxItersExceeded: return "MaxItersExceeded";
    case Errc::RepairStalled: return "RepairStalled";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::UnreachableLevel: return "UnreachableLevel";
    case Errc::NonIntegralVolume: return "NonIntegralVolume";
    case Errc::IoError: return "IoError";
    case Errc::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

}  // namespace gime
