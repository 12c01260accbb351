#include "gime/thresholds.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gime {

using nlohmann::json;
using nlohmann::ordered_json;

MeritDirection default_direction(MetricId id) {
  switch (id) {
    case MetricId::Delay:
    case MetricId::Distortion:
    case MetricId::Mismatch:
      return MeritDirection::LowerBetter;
    default:
      return MeritDirection::HigherBetter;
  }
}

Criterion Criterion::equal_pool_optimal(double tolerance) {
  if (tolerance < 0) throw Error(Errc::BadArgument, "tolerance must be >= 0");
  Criterion c;
  c.kind = Kind::EqualPoolOptimal;
  c.tolerance = tolerance;
  return c;
}

Criterion Criterion::range(double lo, double hi) {
  if (lo > hi) throw Error(Errc::BadArgument, "range lo must be <= hi");
  Criterion c;
  c.kind = Kind::Range;
  c.lo = lo;
  c.hi = hi;
  return c;
}

Criterion Criterion::at_least(double x) {
  Criterion c;
  c.kind = Kind::AtLeast;
  c.value = x;
  return c;
}

Criterion Criterion::at_most(double x) {
  Criterion c;
  c.kind = Kind::AtMost;
  c.value = x;
  return c;
}

Criterion Criterion::ignore() { return Criterion{}; }

ThresholdSpec::ThresholdSpec() {
  for (MetricId id : all_metrics()) {
    directions[static_cast<size_t>(id)] = default_direction(id);
  }
}

namespace {

ordered_json criterion_to_json(const Criterion& c) {
  ordered_json j;
  switch (c.kind) {
    case Criterion::Kind::EqualPoolOptimal:
      j["criterion"] = "equal_pool_optimal";
      j["tolerance"] = c.tolerance;
      break;
    case Criterion::Kind::Range:
      j["criterion"] = "range";
      j["lo"] = c.lo;
      j["hi"] = c.hi;
      break;
    case Criterion::Kind::AtLeast:
      j["criterion"] = "at_least";
      j["value"] = c.value;
      break;
    case Criterion::Kind::AtMost:
      j["criterion"] = "at_most";
      j["value"] = c.value;
      break;
    case Criterion::Kind::Ignore:
      j["criterion"] = "ignore";
      break;
  }
  return j;
}

Criterion criterion_from_json(const json& j, const std::string& metric) {
  const auto kind = j.at("criterion").get<std::string>();
  if (kind == "equal_pool_optimal") {
    return Criterion::equal_pool_optimal(j.value("tolerance", 0.0));
  }
  if (kind == "range") {
    return Criterion::range(j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  if (kind == "at_least") return Criterion::at_least(j.at("value").get<double>());
  if (kind == "at_most") return Criterion::at_most(j.at("value").get<double>());
  if (kind == "ignore") return Criterion::ignore();
  throw Error(Errc::BadArgument,
              "unknown criterion kind \"" + kind + "\" for metric " + metric);
}

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, std::string("cannot open ") + what + ": " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string ThresholdSpec::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "threshold_spec";
  ordered_json criteria_json;
  ordered_json directions_json;
  for (MetricId id : all_metrics()) {
    const auto key = std::string(metric_name(id));
    criteria_json[key] = criterion_to_json(criterion(id));
    directions_json[key] = direction(id) == MeritDirection::HigherBetter
                               ? "higher_better"
                               : "lower_better";
  }
  out["criteria"] = std::move(criteria_json);
  out["directions"] = std::move(directions_json);
  return out.dump(2);
}

ThresholdSpec ThresholdSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::BadArgument,
                std::string("threshold spec JSON parse failure: ") + e.what());
  }
  ThresholdSpec spec;
  if (j.contains("criteria")) {
    for (MetricId id : all_metrics()) {
      const auto key = std::string(metric_name(id));
      if (j["criteria"].contains(key)) {
        spec.set_criterion(id, criterion_from_json(j["criteria"][key], key));
      }
    }
  }
  if (j.contains("directions")) {
    for (MetricId id : all_metrics()) {
      const auto key = std::string(metric_name(id));
      if (j["directions"].contains(key)) {
        const auto d = j["directions"][key].get<std::string>();
        if (d == "higher_better") {
          spec.set_direction(id, MeritDirection::HigherBetter);
        } else if (d == "lower_better") {
          spec.set_direction(id, MeritDirection::LowerBetter);
        } else {
          throw Error(Errc::BadArgument, "unknown direction \"" + d + "\"");
        }
      }
    }
  }
  return spec;
}

ThresholdSpec ThresholdSpec::load(const std::string& path) {
  return from_json(slurp(path, "threshold spec"));
}

std::string_view sensitivity_level_name(SensitivityLevel level) {
  switch (level) {
    case SensitivityLevel::High: return "high";
    case SensitivityLevel::Moderate: return "moderate";
    case SensitivityLevel::Low: return "low";
  }
  return "low";
}

SensitivityLevel sensitivity_level_from_name(std::string_view name) {
  if (name == "high") return SensitivityLevel::High;
  if (name == "moderate") return SensitivityLevel::Moderate;
  if (name == "low") return SensitivityLevel::Low;
  throw Error(Errc::BadArgument, "unknown sensitivity level: " + std::string(name));
}

std::string SensitivityProfile::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "sensitivity_profile";
  ordered_json levels;
  for (MetricId id : all_metrics()) {
    const auto& e = entry(id);
    ordered_json cell;
    cell["level"] = std::string(sensitivity_level_name(e.level));
    cell["provenance"] = e.fitted ? "fitted" : "manual";
    if (e.correlation) cell["correlation"] = *e.correlation;
    levels[std::string(metric_name(id))] = std::move(cell);
  }
  out["levels"] = std::move(levels);
  return out.dump(2);
}

SensitivityProfile SensitivityProfile::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::BadArgument,
                std::string("sensitivity profile JSON parse failure: ") + e.what());
  }
  SensitivityProfile profile;
  if (!j.contains("levels") || !j["levels"].is_object()) {
    throw Error(Errc::BadArgument, "sensitivity profile missing \"levels\"");
  }
  for (MetricId id : all_metrics()) {
    const auto key = std::string(metric_name(id));
    if (!j["levels"].contains(key)) continue;
    const auto& cell = j["levels"][key];
    SensitivityEntry e;
    e.level = sensitivity_level_from_name(cell.at("level").get<std::string>());
    e.fitted = cell.value("provenance", "manual") == std::string("fitted");
    if (cell.contains("correlation")) {
      const double rho = cell["correlation"].get<double>();
      if (rho < -1 || rho > 1) {
        throw Error(Errc::BadArgument, "correlation for " + key + " outside [-1, 1]");
      }
      e.correlation = rho;
    }
    profile.set(id, e);
  }
  return profile;
}

SensitivityProfile SensitivityProfile::load(const std::string& path) {
  return from_json(slurp(path, "sensitivity profile"));
}

std::string ThresholdPolicy::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "threshold_policy";
  out["count_tolerance"] = count_tolerance;
  out["real_tolerance_rel"] = real_tolerance_rel;
  out["moderate_lo_frac"] = moderate_lo_frac;
  out["moderate_hi_frac"] = moderate_hi_frac;
  ordered_json overrides;
  for (const auto& [id, o] : moderate_overrides) {
    ordered_json cell;
    switch (o.kind) {
      case ModerateOverride::Kind::RangeFrac:
        cell = {{"kind", "range_frac"}, {"lo", o.a}, {"hi", o.b}};
        break;
      case ModerateOverride::Kind::AtLeastFrac:
        cell = {{"kind", "at_least_frac"}, {"frac", o.a}};
        break;
      case ModerateOverride::Kind::AtLeastValue:
        cell = {{"kind", "at_least"}, {"value", o.a}};
        break;
      case ModerateOverride::Kind::AtMostValue:
        cell = {{"kind", "at_most"}, {"value", o.a}};
        break;
    }
    overrides[std::string(metric_name(id))] = std::move(cell);
  }
  out["moderate_overrides"] = std::move(overrides);
  ordered_json tolerances;
  for (const auto& [id, t] : tolerance_overrides) {
    tolerances[std::string(metric_name(id))] = t;
  }
  out["tolerance_overrides"] = std::move(tolerances);
  return out.dump(2);
}

ThresholdPolicy ThresholdPolicy::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::BadArgument,
                std::string("threshold policy JSON parse failure: ") + e.what());
  }
  ThresholdPolicy p;
  p.count_tolerance = j.value("count_tolerance", 0.0);
  p.real_tolerance_rel = j.value("real_tolerance_rel", 1e-6);
  p.moderate_lo_frac = j.value("moderate_lo_frac", 0.25);
  p.moderate_hi_frac = j.value("moderate_hi_frac", 0.75);
  if (j.contains("moderate_overrides")) {
    for (auto it = j["moderate_overrides"].begin(); it != j["moderate_overrides"].end();
         ++it) {
      const MetricId id = metric_from_name(it.key());
      const auto& cell = it.value();
      ThresholdPolicy::ModerateOverride o;
      const auto kind = cell.at("kind").get<std::string>();
      if (kind == "range_frac") {
        o.kind = ThresholdPolicy::ModerateOverride::Kind::RangeFrac;
        o.a = cell.at("lo").get<double>();
        o.b = cell.at("hi").get<double>();
      } else if (kind == "at_least_frac") {
        o.kind = ThresholdPolicy::ModerateOverride::Kind::AtLeastFrac;
        o.a = cell.at("frac").get<double>();
      } else if (kind == "at_least") {
        o.kind = ThresholdPolicy::ModerateOverride::Kind::AtLeastValue;
        o.a = cell.at("value").get<double>();
      } else if (kind == "at_most") {
        o.kind = ThresholdPolicy::ModerateOverride::Kind::AtMostValue;
        o.a = cell.at("value").get<double>();
      } else {
        throw Error(Errc::BadArgument, "unknown moderate override kind: " + kind);
      }
      p.moderate_overrides[id] = o;
    }
  }
  if (j.contains("tolerance_overrides")) {
    for (auto it = j["tolerance_overrides"].begin(); it != j["tolerance_overrides"].end();
         ++it) {
      p.tolerance_overrides[metric_from_name(it.key())] = it.value().get<double>();
    }
  }
  return p;
}

ThresholdPolicy ThresholdPolicy::load(const std::string& path) {
  return from_json(slurp(path, "threshold policy"));
}

bool metric_is_count(MetricId id) {
  return id == MetricId::Volume || id == MetricId::Scope || id == MetricId::Variety;
}

ThresholdSpec derive_thresholds(const SensitivityProfile& profile,
                                const MetricVector& pool,
                                const ThresholdPolicy& policy) {
  ThresholdSpec spec;
  for (MetricId id : all_metrics()) {
    const auto& entry = profile.entry(id);
    if (entry.level == SensitivityLevel::Low) {
      spec.set_criterion(id, Criterion::ignore());
      continue;
    }
    if (!pool.present(id)) {
      throw Error(Errc::MissingPoolMetric,
                  "pool metric " + std::string(metric_name(id)) +
                      " required by a non-low sensitivity level is absent");
    }
    const double pool_value = pool.get(id);
    if (entry.level == SensitivityLevel::High) {
      double tolerance;
      if (auto it = policy.tolerance_overrides.find(id);
          it != policy.tolerance_overrides.end()) {
        tolerance = it->second;
      } else if (metric_is_count(id)) {
        tolerance = policy.count_tolerance;
      } else {
        tolerance = policy.real_tolerance_rel * std::max(1.0, std::abs(pool_value));
      }
      spec.set_criterion(id, Criterion::equal_pool_optimal(tolerance));
      continue;
    }
    // Moderate
    if (auto it = policy.moderate_overrides.find(id);
        it != policy.moderate_overrides.end()) {
      const auto& o = it->second;
      switch (o.kind) {
        case ThresholdPolicy::ModerateOverride::Kind::RangeFrac:
          spec.set_criterion(id, Criterion::range(o.a * pool_value, o.b * pool_value));
          break;
        case ThresholdPolicy::ModerateOverride::Kind::AtLeastFrac:
          spec.set_criterion(id, Criterion::at_least(o.a * pool_value));
          break;
        case ThresholdPolicy::ModerateOverride::Kind::AtLeastValue:
          spec.set_criterion(id, Criterion::at_least(o.a));
          break;
        case ThresholdPolicy::ModerateOverride::Kind::AtMostValue:
          spec.set_criterion(id, Criterion::at_most(o.a));
          break;
      }
      continue;
    }
    if (spec.direction(id) == MeritDirection::HigherBetter) {
      spec.set_criterion(id, Criterion::range(policy.moderate_lo_frac * pool_value,
                                              policy.moderate_hi_frac * pool_value));
    } else {
      // Reasonable for a lower-better metric: no worse than the pool.
      spec.set_criterion(id, Criterion::at_most(pool_value));
    }
  }
  return spec;
}

}  // namespace gime
