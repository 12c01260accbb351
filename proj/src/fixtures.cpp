#include "gime/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "gime/csv.hpp"
#include "gime/rng.hpp"

namespace gime {

namespace {

constexpr int64_t kCivilEpochStart = 1388534400;  // 2014-01-01T00:00:00Z
constexpr uint64_t kCivilSpanHours = 2190 * 24;   // six 365-day years

void shuffle(std::vector<uint32_t>& values, Rng& rng) {
  for (uint64_t i = values.size(); i > 1; --i) {
    const uint64_t j = rng.bounded(i);
    std::swap(values[i - 1], values[j]);
  }
}

std::string zero_pad(uint64_t value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

std::vector<uint64_t> exact_hhi_composition(uint64_t total, uint64_t hhi_num,
                                            uint64_t hhi_den) {
  // Search at the canonical 10000 scale and scale linearly: multiplying all
  // counts by c multiplies both the total and sqrt(sum of squares) by c,
  // leaving the index unchanged.
  if (total % 10000 != 0) {
    throw Error(Errc::BadArgument, "composition total must be a multiple of 10000");
  }
  const uint64_t scale = total / 10000;
  const uint64_t base_total = 10000;
  const uint64_t want_sq = hhi_num * base_total * base_total / hhi_den;

  // Family: p large groups of size a, then q groups of b and r of b+1.
  for (uint64_t p = 1; p <= 6; ++p) {
    for (uint64_t a = base_total / (p + 1); a <= base_total / p; ++a) {
      if (p * a * a > want_sq) continue;
      const uint64_t rem = base_total - p * a;
      const uint64_t rem_sq = want_sq - p * a * a;
      if (rem == 0) {
        if (rem_sq == 0) {
          std::vector<uint64_t> out(p, a * scale);
          return out;
        }
        continue;
      }
      if (rem_sq == 0) continue;
      const uint64_t q_lo = (rem + a - 1) / a;
      for (uint64_t q = std::max<uint64_t>(1, q_lo); q <= rem; ++q) {
        const uint64_t b = rem / q;
        if (b == 0 || b > a) continue;
        const uint64_t r = rem - q * b;
        const uint64_t sq = (q - r) * b * b + r * (b + 1) * (b + 1);
        if (sq == rem_sq) {
          std::vector<uint64_t> out;
          out.insert(out.end(), p, a * scale);
          out.insert(out.end(), r, (b + 1) * scale);
          out.insert(out.end(), q - r, b * scale);
          return out;
        }
      }
    }
  }
  throw Error(Errc::BadArgument, "no exact composition found for requested index");
}

TableFixture make_civil_fixture(const CivilFixtureOptions& options) {
  const uint64_t n = options.records;
  if (n % 10000 != 0) {
    throw Error(Errc::BadArgument, "civil fixture size must be a multiple of 10000");
  }
  Rng rng(options.seed);

  // Scope runs: 32 provinces, each an hourly-consecutive block. Province 0
  // anchors the window start; province 31 ends exactly at the 6-year mark.
  constexpr uint64_t kProvinces = 32;
  std::vector<uint64_t> counts(kProvinces, n / kProvinces);
  for (uint64_t p = 0; p < n % kProvinces; ++p) counts[p] += 1;

  std::vector<uint64_t> starts(kProvinces, 0);
  for (uint64_t p = 1; p + 1 < kProvinces; ++p) {
    starts[p] = rng.bounded(kCivilSpanHours - counts[p] + 1);
  }
  starts[kProvinces - 1] = kCivilSpanHours - counts[kProvinces - 1] + 1;

  // Record types: 100 values, each appearing exactly n/100 times, shuffled.
  std::vector<uint32_t> types(n);
  for (uint64_t i = 0; i < n; ++i) types[i] = static_cast<uint32_t>(i % 100);
  shuffle(types, rng);

  // Labels: exactly half positive, shuffled.
  std::vector<uint32_t> labels(n);
  for (uint64_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 1 : 0;
  shuffle(labels, rng);

  // Courts: composition whose concentration index is exactly 0.245.
  const auto court_sizes = exact_hhi_composition(n);
  std::vector<uint32_t> courts;
  courts.reserve(n);
  for (size_t c = 0; c < court_sizes.size(); ++c) {
    courts.insert(courts.end(), court_sizes[c], static_cast<uint32_t>(c));
  }
  shuffle(courts, rng);

  TableFixture fixture;
  DatasetManifest& m = fixture.manifest;
  m.schema = {{"record_id", FieldKind::Text}, {"filed_at", FieldKind::Timestamp},
              {"recorded_at", FieldKind::Timestamp}, {"province", FieldKind::Text},
              {"case_type", FieldKind::Text},  {"court", FieldKind::Text},
              {"corrupted", FieldKind::Boolean}, {"label", FieldKind::Integer}};
  m.record_id_field = "record_id";
  m.event_time_field = "filed_at";
  m.collection_time_field = "recorded_at";
  m.scope_field = "province";
  m.variety_field = "case_type";
  m.granularity_constant = 1.0;
  m.aggregation_field = "court";
  m.distortion_field = "corrupted";
  m.label_field = "label";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};
  m.nominal_sampling_interval = TimeQuantity{3600.0, "hour"};
  m.time_unit = TimeQuantity::from_unit_name("year365");
  m.epoch_unit = TimeQuantity::from_unit_name("second");
  m.duration_mode = DurationMode::Span;

  fixture.rows.reserve(n);
  uint64_t id = 0;
  const int width = n >= 100000 ? 6 : 5;
  for (uint64_t p = 0; p < kProvinces; ++p) {
    for (uint64_t j = 0; j < counts[p]; ++j) {
      const uint64_t hour = starts[p] + j;
      const int64_t ts = kCivilEpochStart + static_cast<int64_t>(hour) * 3600;
      fixture.rows.push_back({"r" + zero_pad(id, width), std::to_string(ts),
                              std::to_string(ts), "province_" + zero_pad(p, 2),
                              "type_" + zero_pad(types[id], 2),
                              "court_" + zero_pad(courts[id], 3),
                              "false", std::to_string(labels[id])});
      ++id;
    }
  }
  return fixture;
}

ThresholdSpec civil_threshold_spec(uint64_t pool_records) {
  ThresholdSpec spec;
  spec.set_criterion(MetricId::Volume,
                     Criterion::at_least(0.6 * static_cast<double>(pool_records)));
  spec.set_criterion(MetricId::Scope, Criterion::at_least(27));
  spec.set_criterion(MetricId::Variety, Criterion::equal_pool_optimal(0));
  spec.set_criterion(MetricId::Distortion, Criterion::at_most(0));
  spec.set_criterion(MetricId::Mismatch, Criterion::at_most(0.01));
  return spec;
}

SensitivityProfile civil_sensitivity_profile() {
  SensitivityProfile profile;
  auto manual = [](SensitivityLevel level) {
    SensitivityEntry e;
    e.level = level;
    e.fitted = false;
    return e;
  };
  profile.set(MetricId::Variety, manual(SensitivityLevel::High));
  profile.set(MetricId::Aggregation, manual(SensitivityLevel::High));
  profile.set(MetricId::Distortion, manual(SensitivityLevel::High));
  profile.set(MetricId::Mismatch, manual(SensitivityLevel::High));
  profile.set(MetricId::Volume, manual(SensitivityLevel::Moderate));
  profile.set(MetricId::Scope, manual(SensitivityLevel::Moderate));
  profile.set(MetricId::Delay, manual(SensitivityLevel::Low));
  profile.set(MetricId::Granularity, manual(SensitivityLevel::Low));
  profile.set(MetricId::Duration, manual(SensitivityLevel::Low));
  profile.set(MetricId::SamplingRate, manual(SensitivityLevel::Low));
  profile.set(MetricId::Coverage, manual(SensitivityLevel::Low));
  return profile;
}

ThresholdPolicy civil_threshold_policy() {
  ThresholdPolicy policy;
  policy.moderate_overrides[MetricId::Volume] = {
      ThresholdPolicy::ModerateOverride::Kind::AtLeastFrac, 0.6, 0};
  policy.moderate_overrides[MetricId::Scope] = {
      ThresholdPolicy::ModerateOverride::Kind::AtLeastValue, 27, 0};
  // Subset concentration wobbles with the draw; allow a wider band than the
  // default relative tolerance.
  policy.tolerance_overrides[MetricId::Aggregation] = 0.02;
  return policy;
}

TableFixture make_ctr_fixture(uint64_t seed) {
  constexpr uint64_t kRecords = 1000;
  Rng rng(seed);

  std::vector<uint32_t> clicks(kRecords);
  for (uint64_t i = 0; i < kRecords; ++i) clicks[i] = i < 170 ? 1 : 0;
  shuffle(clicks, rng);

  TableFixture fixture;
  DatasetManifest& m = fixture.manifest;
  m.schema = {{"impression_id", FieldKind::Text}, {"shown_at", FieldKind::Timestamp},
              {"site_id", FieldKind::Text},       {"ad_type", FieldKind::Text},
              {"device", FieldKind::Text},        {"click", FieldKind::Integer}};
  m.record_id_field = "impression_id";
  m.event_time_field = "shown_at";
  m.scope_field = "site_id";
  m.variety_field = "ad_type";
  m.granularity_constant = 1.0;
  m.aggregation_field = "device";
  m.label_field = "click";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};
  m.nominal_sampling_interval = TimeQuantity::from_unit_name("hour");
  m.time_unit = TimeQuantity::from_unit_name("day");
  m.epoch_unit = TimeQuantity::from_unit_name("second");

  constexpr int64_t kStart = 1412640000;  // 2014-10-07T00:00:00Z
  fixture.rows.reserve(kRecords);
  for (uint64_t i = 0; i < kRecords; ++i) {
    const int64_t ts = kStart + static_cast<int64_t>(i) * 3600;
    fixture.rows.push_back({"imp" + zero_pad(i, 4), std::to_string(ts),
                            "site_" + std::to_string(i % 20),
                            "ad_" + std::to_string(i % 12),
                            "device_" + std::to_string(i % 3),
                            std::to_string(clicks[i])});
  }
  return fixture;
}

TableFixture make_weather_fixture(uint64_t seed) {
  constexpr uint64_t kStations = 9;
  constexpr uint64_t kDays = 364;
  Rng rng(seed);

  std::vector<uint32_t> rain(kStations * kDays);
  for (uint64_t i = 0; i < rain.size(); ++i) rain[i] = i < rain.size() / 2 ? 1 : 0;
  shuffle(rain, rng);

  TableFixture fixture;
  DatasetManifest& m = fixture.manifest;
  m.schema = {{"obs_id", FieldKind::Text},      {"observed_at", FieldKind::Timestamp},
              {"station", FieldKind::Text},     {"cloud_cover", FieldKind::Real},
              {"humidity", FieldKind::Real},    {"pressure", FieldKind::Real},
              {"radiation", FieldKind::Real},   {"rainfall", FieldKind::Real},
              {"sunshine", FieldKind::Real},    {"temp_mean", FieldKind::Real},
              {"temp_max", FieldKind::Real},    {"err", FieldKind::Real},
              {"rain_flag", FieldKind::Integer}};
  m.record_id_field = "obs_id";
  m.event_time_field = "observed_at";
  m.collection_time_field = "observed_at";
  m.scope_field = "station";
  m.scope_constant = 4.0;
  m.feature_list = std::vector<std::string>{"cloud_cover", "humidity", "pressure",
                                            "radiation",   "rainfall", "sunshine",
                                            "temp_mean",   "temp_max"};
  m.granularity_constant = 0.6458;
  m.distortion_field = "err";
  m.label_field = "rain_flag";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};
  m.nominal_sampling_interval = TimeQuantity::from_unit_name("day");
  m.time_unit = TimeQuantity::from_unit_name("year365");
  m.epoch_unit = TimeQuantity::from_unit_name("second");

  constexpr int64_t kStart = 946684800;  // 2000-01-01T00:00:00Z
  const char* stations[kStations] = {"basel",    "budapest", "debilt",
                                     "dusseldorf", "london",  "ljubljana",
                                     "maastricht", "munich",  "oslo"};
  fixture.rows.reserve(kStations * kDays);
  uint64_t id = 0;
  for (uint64_t s = 0; s < kStations; ++s) {
    for (uint64_t d = 0; d < kDays; ++d) {
      const int64_t ts = kStart + static_cast<int64_t>(d) * 86400;
      auto real_cell = [&](double base, double spread) {
        return std::to_string(base + spread * rng.next_double());
      };
      fixture.rows.push_back({"obs" + zero_pad(id, 5), std::to_string(ts),
                              stations[s], real_cell(0.0, 1.0), real_cell(40, 60),
                              real_cell(990, 40), real_cell(0, 30), real_cell(0, 20),
                              real_cell(0, 14), real_cell(-5, 30), real_cell(0, 35),
                              "0", std::to_string(rain[id])});
      ++id;
    }
  }
  return fixture;
}

TableFixture make_selection_stress_fixture(uint64_t seed) {
  constexpr uint64_t kRecords = 1000;
  Rng rng(seed);

  // Types 0..49 appear 19 times each; types 50..99 exactly once.
  std::vector<uint32_t> types;
  types.reserve(kRecords);
  for (uint32_t t = 0; t < 50; ++t) {
    for (int j = 0; j < 19; ++j) types.push_back(t);
  }
  for (uint32_t t = 50; t < 100; ++t) types.push_back(t);
  shuffle(types, rng);

  std::vector<uint32_t> labels(kRecords);
  for (uint64_t i = 0; i < kRecords; ++i) labels[i] = i < kRecords / 2 ? 1 : 0;
  shuffle(labels, rng);

  TableFixture fixture;
  DatasetManifest& m = fixture.manifest;
  m.schema = {{"id", FieldKind::Text},
              {"region", FieldKind::Text},
              {"kind", FieldKind::Text},
              {"flag", FieldKind::Boolean},
              {"label", FieldKind::Integer}};
  m.record_id_field = "id";
  m.scope_field = "region";
  m.variety_field = "kind";
  m.distortion_field = "flag";
  m.label_field = "label";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};

  fixture.rows.reserve(kRecords);
  for (uint64_t i = 0; i < kRecords; ++i) {
    fixture.rows.push_back({"s" + zero_pad(i, 4), "region_" + std::to_string(i % 10),
                            "kind_" + zero_pad(types[i], 2), "false",
                            std::to_string(labels[i])});
  }
  return fixture;
}

void write_fixture_files(const TableFixture& fixture,
                         const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + "_pool.csv"), std::ios::binary);
    if (!csv) {
      throw Error(Errc::IoError, "cannot write fixture CSV under " + dir.string());
    }
    std::vector<std::string> names;
    for (const auto& f : fixture.manifest.schema) names.push_back(f.name);
    csv << csv_join(names) << '\n';
    for (const auto& row : fixture.rows) csv << csv_join(row) << '\n';
  }
  std::ofstream manifest(dir / (stem + "_manifest.json"), std::ios::binary);
  manifest << fixture.manifest.to_json() << '\n';
}

void write_civil_fixture_files(const std::filesystem::path& dir,
                               const CivilFixtureOptions& options) {
  const auto fixture = make_civil_fixture(options);
  write_fixture_files(fixture, dir, "civil");
  {
    std::ofstream out(dir / "civil_thresholds.json", std::ios::binary);
    out << civil_threshold_spec(options.records).to_json() << '\n';
  }
  {
    std::ofstream out(dir / "civil_profile.json", std::ios::binary);
    out << civil_sensitivity_profile().to_json() << '\n';
  }
  {
    std::ofstream out(dir / "civil_policy.json", std::ios::binary);
    out << civil_threshold_policy().to_json() << '\n';
  }
}

}  // namespace gime
