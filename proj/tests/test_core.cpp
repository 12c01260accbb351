#include <doctest.h>

#include <json.hpp>

#include "gime/manifest.hpp"
#include "gime/metric_types.hpp"
#include "gime/rng.hpp"

using namespace gime;

TEST_SUITE_BEGIN("core");

TEST_CASE("canonical metric order is stable") {
  const auto metrics = all_metrics();
  REQUIRE(metrics.size() == 11);
  CHECK(metric_name(metrics[0]) == "volume");
  CHECK(metric_name(metrics[1]) == "delay");
  CHECK(metric_name(metrics[2]) == "scope");
  CHECK(metric_name(metrics[3]) == "granularity");
  CHECK(metric_name(metrics[4]) == "variety");
  CHECK(metric_name(metrics[5]) == "duration");
  CHECK(metric_name(metrics[6]) == "sampling_rate");
  CHECK(metric_name(metrics[7]) == "aggregation");
  CHECK(metric_name(metrics[8]) == "coverage");
  CHECK(metric_name(metrics[9]) == "distortion");
  CHECK(metric_name(metrics[10]) == "mismatch");
  for (MetricId id : metrics) {
    CHECK(metric_from_name(metric_name(id)) == id);
  }
  CHECK_THROWS_AS(metric_from_name("entropy"), Error);
}

TEST_CASE("default type classification") {
  CHECK(classify_default(MetricId::Volume) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::Delay) == MetricTypeClass::MaximumType);
  CHECK(classify_default(MetricId::Granularity) == MetricTypeClass::MeanType);
  CHECK(classify_default(MetricId::Scope) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::Variety) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::Duration) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::Aggregation) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::Coverage) == MetricTypeClass::Additive);
  CHECK(classify_default(MetricId::SamplingRate) == MetricTypeClass::MeanType);
  CHECK(classify_default(MetricId::Distortion) == MetricTypeClass::MeanType);
  CHECK(classify_default(MetricId::Mismatch) == MetricTypeClass::MeanType);
}

TEST_CASE("metric vector validation catches range violations") {
  MetricVector v;
  CHECK(v.validate().empty());
  v.set(MetricId::Volume, 10.5);
  CHECK(v.validate().size() == 1);
  v.set(MetricId::Volume, 10);
  v.set(MetricId::Aggregation, 0.0);
  v.set(MetricId::Coverage, 1.5);
  v.set(MetricId::Granularity, -1);
  CHECK(v.validate().size() == 3);
}

TEST_CASE("metric vector JSON round-trips absent markers losslessly") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    MetricVector v;
    for (MetricId id : all_metrics()) {
      if (rng.bounded(3) == 0) continue;  // leave absent
      double value = static_cast<double>(rng.bounded(1000));
      if (id == MetricId::Aggregation || id == MetricId::Coverage) {
        value = (value + 1) / 1001.0;
      }
      if (id == MetricId::Granularity) value += 0.5;
      v.set(id, value);
    }
    const auto text = metric_vector_to_json(v, "day");
    const auto back = metric_vector_from_json(text);
    for (MetricId id : all_metrics()) {
      REQUIRE(v.present(id) == back.present(id));
      if (v.present(id)) CHECK(v.get(id) == back.get(id));
    }
  }
}

TEST_CASE("metric vector JSON keeps canonical key order") {
  MetricVector v;
  v.set(MetricId::Mismatch, 0.1);
  v.set(MetricId::Volume, 5);
  const auto text = metric_vector_to_json(v, "second");
  CHECK(text.find("\"volume\"") < text.find("\"delay\""));
  CHECK(text.find("\"delay\"") < text.find("\"mismatch\""));
  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed["schema_version"] == 1);
  CHECK(parsed["metrics"]["coverage"].is_null());
}

TEST_CASE("manifest JSON round-trip and digest stability") {
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Text},
              {"t", FieldKind::Timestamp},
              {"city", FieldKind::Text},
              {"label", FieldKind::Integer}};
  m.record_id_field = "id";
  m.event_time_field = "t";
  m.scope_field = "city";
  m.label_field = "label";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};
  m.time_unit = TimeQuantity::from_unit_name("day");
  m.epoch_unit = TimeQuantity::from_unit_name("second");

  const auto text = m.to_json();
  const auto back = DatasetManifest::from_json(text);
  CHECK(back.schema == m.schema);
  CHECK(back.record_id_field == m.record_id_field);
  CHECK(back.scope_field == m.scope_field);
  CHECK(back.time_unit == m.time_unit);
  CHECK(back.digest() == m.digest());

  // Any binding change must change the digest.
  DatasetManifest other = back;
  other.scope_field = "label";
  CHECK(other.digest() != m.digest());
}

TEST_CASE("manifest validation flags kind mismatches and disabled metrics") {
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Text},
              {"score", FieldKind::Real},
              {"label", FieldKind::Real}};
  m.record_id_field = "id";

  auto issues = validate_manifest(m);
  bool delay_warning = false;
  for (const auto& issue : issues) {
    CHECK(issue.severity == ManifestIssue::Severity::Warning);
    if (issue.disabled_metric == MetricId::Delay) {
      delay_warning = true;
      CHECK(issue.message.find("delay defaults to 0") != std::string::npos);
      CHECK(issue.message.find("sampling_rate disabled") != std::string::npos);
    }
  }
  CHECK(delay_warning);

  // Real-kind label with a binary target is an error.
  m.label_field = "label";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};
  bool label_error = false;
  for (const auto& issue : validate_manifest(m)) {
    if (issue.severity == ManifestIssue::Severity::Error &&
        issue.message.find("real-kind") != std::string::npos) {
      label_error = true;
    }
  }
  CHECK(label_error);
}

TEST_CASE("time unit table") {
  CHECK(TimeQuantity::from_unit_name("day").seconds == 86400.0);
  CHECK(TimeQuantity::from_unit_name("year365").seconds == 31536000.0);
  CHECK(TimeQuantity::from_unit_name("year").seconds == 31557600.0);
  CHECK_THROWS_AS(TimeQuantity::from_unit_name("fortnight"), Error);
}

TEST_SUITE_END();
