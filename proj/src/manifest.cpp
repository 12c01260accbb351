#include "gime/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gime/digest.hpp"

namespace gime {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::Text: return "text";
    case FieldKind::Integer: return "integer";
    case FieldKind::Real: return "real";
    case FieldKind::Timestamp: return "timestamp";
    case FieldKind::Boolean: return "boolean";
  }
  return "text";
}

FieldKind field_kind_from_name(std::string_view name) {
  if (name == "text") return FieldKind::Text;
  if (name == "integer") return FieldKind::Integer;
  if (name == "real") return FieldKind::Real;
  if (name == "timestamp") return FieldKind::Timestamp;
  if (name == "boolean") return FieldKind::Boolean;
  throw Error(Errc::ManifestInvalid, "unknown field kind: " + std::string(name));
}

TimeQuantity TimeQuantity::from_unit_name(std::string_view unit) {
  if (unit == "second") return {1.0, "second"};
  if (unit == "minute") return {60.0, "minute"};
  if (unit == "hour") return {3600.0, "hour"};
  if (unit == "day") return {86400.0, "day"};
  if (unit == "week") return {604800.0, "week"};
  if (unit == "year") return {31557600.0, "year"};      // 365.25 days
  if (unit == "year365") return {31536000.0, "year365"};  // 365 days
  throw Error(Errc::BadArgument, "unknown time unit: " + std::string(unit));
}

std::optional<size_t> DatasetManifest::field_index(const std::string& name) const {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return i;
  }
  return std::nullopt;
}

const FieldSpec* DatasetManifest::field(const std::string& name) const {
  auto idx = field_index(name);
  return idx ? &schema[*idx] : nullptr;
}

namespace {

ordered_json time_quantity_to_json(const TimeQuantity& q) {
  ordered_json j;
  j["seconds"] = q.seconds;
  j["name"] = q.name;
  return j;
}

TimeQuantity time_quantity_from_json(const json& j, const char* what) {
  if (j.is_string()) return TimeQuantity::from_unit_name(j.get<std::string>());
  if (j.is_object()) {
    TimeQuantity q;
    if (j.contains("unit")) {
      q = TimeQuantity::from_unit_name(j["unit"].get<std::string>());
      if (j.contains("value")) q.seconds *= j["value"].get<double>();
      return q;
    }
    if (j.contains("seconds")) {
      q.seconds = j["seconds"].get<double>();
      q.name = j.value("name", "custom");
      return q;
    }
  }
  throw Error(Errc::ManifestInvalid,
              std::string(what) + ": expected a unit name or {value, unit} / {seconds}");
}

template <typename T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

}  // namespace

std::string DatasetManifest::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "dataset_manifest";
  ordered_json schema_json = ordered_json::array();
  for (const auto& f : schema) {
    schema_json.push_back({{"name", f.name}, {"kind", std::string(field_kind_name(f.kind))}});
  }
  out["schema"] = std::move(schema_json);

  ordered_json b;
  b["record_id_field"] = record_id_field;
  put_optional(b, "event_time_field", event_time_field);
  put_optional(b, "collection_time_field", collection_time_field);
  put_optional(b, "scope_field", scope_field);
  put_optional(b, "scope_constant", scope_constant);
  put_optional(b, "variety_field", variety_field);
  put_optional(b, "feature_list", feature_list);
  put_optional(b, "granularity_field", granularity_field);
  put_optional(b, "granularity_constant", granularity_constant);
  put_optional(b, "aggregation_field", aggregation_field);
  put_optional(b, "coverage_field", coverage_field);
  put_optional(b, "coverage_universe", coverage_universe);
  put_optional(b, "distortion_field", distortion_field);
  if (truth_reference) {
    const auto& t = *truth_reference;
    b["truth_reference"] = {{"path", t.path},         {"format", t.format},
                            {"join_key", t.join_key}, {"ref_id", t.ref_id},
                            {"ref_field", t.ref_field},
                            {"compare_field", t.compare_field},
                            {"numeric", t.numeric}};
  } else {
    b["truth_reference"] = nullptr;
  }
  put_optional(b, "label_field", label_field);
  if (mismatch_target) {
    if (mismatch_target->binary) {
      b["mismatch_target"] = mismatch_target->positive_rate;
    } else {
      b["mismatch_target"] = mismatch_target->distribution;
    }
  } else {
    b["mismatch_target"] = nullptr;
  }
  if (nominal_sampling_interval) {
    b["nominal_sampling_interval"] = time_quantity_to_json(*nominal_sampling_interval);
  } else {
    b["nominal_sampling_interval"] = nullptr;
  }
  out["bindings"] = std::move(b);

  out["time_unit"] = time_quantity_to_json(time_unit);
  out["epoch_unit"] = time_quantity_to_json(epoch_unit);
  out["duration_mode"] =
      duration_mode == DurationMode::Span ? "span" : "bucket_union";
  if (bucket_size) {
    out["bucket_size"] = time_quantity_to_json(*bucket_size);
  }
  return out.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ManifestInvalid,
                std::string("manifest JSON parse failure: ") + e.what());
  }

  DatasetManifest m;
  if (!j.contains("schema") || !j["schema"].is_array()) {
    throw Error(Errc::ManifestInvalid, "manifest missing \"schema\" array");
  }
  for (const auto& f : j["schema"]) {
    FieldSpec spec;
    spec.name = f.at("name").get<std::string>();
    spec.kind = field_kind_from_name(f.at("kind").get<std::string>());
    m.schema.push_back(std::move(spec));
  }

  const json empty = json::object();
  const json& b = j.contains("bindings") ? j["bindings"] : empty;
  auto get_str = [&](const char* key) -> std::optional<std::string> {
    if (!b.contains(key) || b[key].is_null()) return std::nullopt;
    return b[key].get<std::string>();
  };
  auto get_real = [&](const char* key) -> std::optional<double> {
    if (!b.contains(key) || b[key].is_null()) return std::nullopt;
    return b[key].get<double>();
  };
  auto get_list = [&](const char* key) -> std::optional<std::vector<std::string>> {
    if (!b.contains(key) || b[key].is_null()) return std::nullopt;
    return b[key].get<std::vector<std::string>>();
  };

  if (!b.contains("record_id_field") || b["record_id_field"].is_null()) {
    throw Error(Errc::ManifestInvalid, "bindings.record_id_field is required");
  }
  m.record_id_field = b["record_id_field"].get<std::string>();
  m.event_time_field = get_str("event_time_field");
  m.collection_time_field = get_str("collection_time_field");
  m.scope_field = get_str("scope_field");
  m.scope_constant = get_real("scope_constant");
  m.variety_field = get_str("variety_field");
  m.feature_list = get_list("feature_list");
  m.granularity_field = get_str("granularity_field");
  m.granularity_constant = get_real("granularity_constant");
  m.aggregation_field = get_str("aggregation_field");
  m.coverage_field = get_str("coverage_field");
  m.coverage_universe = get_list("coverage_universe");
  m.distortion_field = get_str("distortion_field");
  if (b.contains("truth_reference") && !b["truth_reference"].is_null()) {
    const auto& t = b["truth_reference"];
    TruthReference ref;
    ref.path = t.at("path").get<std::string>();
    ref.format = t.value("format", "csv");
    ref.join_key = t.at("join_key").get<std::string>();
    ref.ref_id = t.value("ref_id", ref.join_key);
    ref.ref_field = t.at("ref_field").get<std::string>();
    ref.compare_field = t.at("compare_field").get<std::string>();
    ref.numeric = t.value("numeric", false);
    m.truth_reference = std::move(ref);
  }
  m.label_field = get_str("label_field");
  if (b.contains("mismatch_target") && !b["mismatch_target"].is_null()) {
    MismatchTarget target;
    if (b["mismatch_target"].is_number()) {
      target.binary = true;
      target.positive_rate = b["mismatch_target"].get<double>();
    } else if (b["mismatch_target"].is_object()) {
      target.binary = false;
      for (auto it = b["mismatch_target"].begin(); it != b["mismatch_target"].end(); ++it) {
        target.distribution[it.key()] = it.value().get<double>();
      }
    } else {
      throw Error(Errc::ManifestInvalid,
                  "mismatch_target must be a rate or a distribution object");
    }
    m.mismatch_target = std::move(target);
  }
  if (b.contains("nominal_sampling_interval") &&
      !b["nominal_sampling_interval"].is_null()) {
    m.nominal_sampling_interval =
        time_quantity_from_json(b["nominal_sampling_interval"],
                                "nominal_sampling_interval");
  }

  m.time_unit = j.contains("time_unit")
                    ? time_quantity_from_json(j["time_unit"], "time_unit")
                    : TimeQuantity{};
  m.epoch_unit = j.contains("epoch_unit")
                     ? time_quantity_from_json(j["epoch_unit"], "epoch_unit")
                     : TimeQuantity{};
  if (j.contains("duration_mode")) {
    const auto mode = j["duration_mode"].get<std::string>();
    if (mode == "span") {
      m.duration_mode = DurationMode::Span;
    } else if (mode == "bucket_union") {
      m.duration_mode = DurationMode::BucketUnion;
    } else {
      throw Error(Errc::ManifestInvalid, "duration_mode must be span or bucket_union");
    }
  }
  if (j.contains("bucket_size") && !j["bucket_size"].is_null()) {
    m.bucket_size = time_quantity_from_json(j["bucket_size"], "bucket_size");
  }
  return m;
}

DatasetManifest DatasetManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string DatasetManifest::digest() const { return hex_digest(to_json()); }

namespace {

void require_field(const DatasetManifest& m, const std::optional<std::string>& name,
                   std::initializer_list<FieldKind> kinds, const char* role,
                   std::vector<ManifestIssue>& issues) {
  if (!name) return;
  const FieldSpec* f = m.field(*name);
  if (!f) {
    issues.push_back({ManifestIssue::Severity::Error,
                      std::string(role) + " binds unknown field \"" + *name + "\"",
                      std::nullopt});
    return;
  }
  for (FieldKind k : kinds) {
    if (f->kind == k) return;
  }
  issues.push_back({ManifestIssue::Severity::Error,
                    std::string(role) + " field \"" + *name +
                        "\" has incompatible kind " +
                        std::string(field_kind_name(f->kind)),
                    std::nullopt});
}

void warn_disabled(MetricId metric, const std::string& why,
                   std::vector<ManifestIssue>& issues) {
  issues.push_back({ManifestIssue::Severity::Warning, why, metric});
}

}  // namespace

std::vector<ManifestIssue> validate_manifest(const DatasetManifest& m) {
  std::vector<ManifestIssue> issues;

  if (m.record_id_field.empty() || !m.field(m.record_id_field)) {
    issues.push_back({ManifestIssue::Severity::Error,
                      "record_id_field must name a schema field", std::nullopt});
  }
  const auto any_kind = {FieldKind::Text, FieldKind::Integer, FieldKind::Real,
                         FieldKind::Timestamp, FieldKind::Boolean};
  require_field(m, std::optional(m.record_id_field), any_kind, "record_id", issues);
  require_field(m, m.event_time_field, {FieldKind::Timestamp}, "event_time", issues);
  require_field(m, m.collection_time_field, {FieldKind::Timestamp},
                "collection_time", issues);
  require_field(m, m.scope_field, any_kind, "scope", issues);
  require_field(m, m.variety_field, any_kind, "variety", issues);
  require_field(m, m.granularity_field, {FieldKind::Real, FieldKind::Integer},
                "granularity", issues);
  require_field(m, m.aggregation_field, any_kind, "aggregation", issues);
  require_field(m, m.coverage_field, any_kind, "coverage", issues);
  require_field(m, m.distortion_field,
                {FieldKind::Real, FieldKind::Integer, FieldKind::Boolean},
                "distortion", issues);
  if (m.feature_list) {
    for (const auto& name : *m.feature_list) {
      if (!m.field(name)) {
        issues.push_back({ManifestIssue::Severity::Error,
                          "feature_list names unknown field \"" + name + "\"",
                          std::nullopt});
      }
    }
  }

  if (m.time_unit.seconds <= 0) {
    issues.push_back({ManifestIssue::Severity::Error, "time_unit must be > 0",
                      std::nullopt});
  }
  if (m.epoch_unit.seconds <= 0) {
    issues.push_back({ManifestIssue::Severity::Error, "epoch_unit must be > 0",
                      std::nullopt});
  }
  if (m.granularity_constant && *m.granularity_constant <= 0) {
    issues.push_back({ManifestIssue::Severity::Error,
                      "granularity_constant must be > 0", std::nullopt});
  }
  if (m.duration_mode == DurationMode::BucketUnion &&
      (!m.bucket_size || m.bucket_size->seconds <= 0)) {
    issues.push_back({ManifestIssue::Severity::Error,
                      "bucket_union duration requires a positive bucket_size",
                      std::nullopt});
  }

  if (m.label_field && m.mismatch_target) {
    const FieldSpec* f = m.field(*m.label_field);
    if (f && f->kind == FieldKind::Real) {
      issues.push_back({ManifestIssue::Severity::Error,
                        "label field \"" + *m.label_field +
                            "\" is real-kind; labels must be text, integer, or boolean",
                        std::nullopt});
    }
    if (!m.mismatch_target->binary) {
      double total = 0;
      for (const auto& [_, p] : m.mismatch_target->distribution) total += p;
      if (std::abs(total - 1.0) > 1e-9) {
        issues.push_back({ManifestIssue::Severity::Error,
                          "categorical mismatch_target must sum to 1",
                          std::nullopt});
      }
    } else if (m.mismatch_target->positive_rate < 0 ||
               m.mismatch_target->positive_rate > 1) {
      issues.push_back({ManifestIssue::Severity::Error,
                        "binary mismatch_target must lie in [0, 1]", std::nullopt});
    }
  }
  if (m.coverage_field && m.coverage_universe && m.coverage_universe->empty()) {
    issues.push_back({ManifestIssue::Severity::Error,
                      "coverage_universe must be non-empty when present",
                      std::nullopt});
  }

  // Absent optional bindings: warn once per disabled metric.
  if (!m.event_time_field) {
    warn_disabled(MetricId::Delay,
                  "no event_time_field: delay defaults to 0; duration and "
                  "sampling_rate disabled",
                  issues);
  }
  if (!m.scope_field && !m.scope_constant) {
    warn_disabled(MetricId::Scope, "no scope binding: scope absent", issues);
  }
  if (!m.variety_field && !m.feature_list) {
    warn_disabled(MetricId::Variety, "no variety binding: variety absent", issues);
  }
  if (!m.granularity_field && !m.granularity_constant) {
    warn_disabled(MetricId::Granularity, "no granularity binding: granularity absent",
                  issues);
  }
  if (!m.aggregation_field) {
    warn_disabled(MetricId::Aggregation, "no aggregation_field: aggregation absent",
                  issues);
  }
  if (!m.coverage_field || !m.coverage_universe) {
    warn_disabled(MetricId::Coverage,
                  "coverage needs coverage_field and coverage_universe: coverage absent",
                  issues);
  }
  if (!m.distortion_field && !m.truth_reference) {
    warn_disabled(MetricId::Distortion,
                  "no distortion_field or truth_reference: distortion absent", issues);
  }
  if (!m.label_field || !m.mismatch_target) {
    warn_disabled(MetricId::Mismatch,
                  "mismatch needs label_field and mismatch_target: mismatch absent",
                  issues);
  }
  if (m.event_time_field && !m.nominal_sampling_interval) {
    warn_disabled(MetricId::SamplingRate,
                  "no nominal_sampling_interval: sampling_rate absent", issues);
  }

  return issues;
}

}  // namespace gime
