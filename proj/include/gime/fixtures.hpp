#pragma once

// Deterministic fixture generators. The civil-style pool is constructed so
// that every metric hits an exact target: 32 scopes, 100 record types,
// hourly runs per scope giving sampling rate exactly 1, a 6-year span, a
// court partition whose Herfindahl index is exactly 0.245, balanced labels
// (mismatch 0 against a 0.5 target), clean error flags, and equal event and
// collection times (delay 0).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gime/dataset.hpp"
#include "gime/manifest.hpp"
#include "gime/thresholds.hpp"

namespace gime {

struct CivilFixtureOptions {
  uint64_t records = 10000;  // must be a multiple of 10000
  uint64_t seed = 7;
};

struct TableFixture {
  DatasetManifest manifest;
  std::vector<std::vector<std::string>> rows;

  Dataset dataset() const { return Dataset::in_memory(manifest, rows); }
};

TableFixture make_civil_fixture(const CivilFixtureOptions& options = {});

// Court-size composition with sum(counts) == total and Herfindahl index
// exactly hhi_num/hhi_den. Total must be a multiple of 10000.
std::vector<uint64_t> exact_hhi_composition(uint64_t total, uint64_t hhi_num = 245,
                                            uint64_t hhi_den = 1000);

// Click-log style sample: 1000 records, positive rate exactly 0.17 against
// a 0.5 target (mismatch 0.33).
TableFixture make_ctr_fixture(uint64_t seed = 11);

// Station-feed style sample: 9 station groups, 8 bound feature columns,
// scope reported as the manifest constant 4, granularity constant 0.6458.
TableFixture make_weather_fixture(uint64_t seed = 13);

// Selection stress pool: 1000 records, 100 types of which 50 appear exactly
// once, balanced binary labels, 10 scope values. Uniform draws well below
// the pool size miss rare types, exercising repair.
TableFixture make_selection_stress_fixture(uint64_t seed = 17);

// Civil threshold artifacts: the shipped gate (volume >= 60% of pool,
// scope >= 27, variety == pool, distortion == 0, mismatch <= 0.01), the
// sensitivity profile behind it, and the policy that derives the gate.
ThresholdSpec civil_threshold_spec(uint64_t pool_records);
SensitivityProfile civil_sensitivity_profile();
ThresholdPolicy civil_threshold_policy();

// Write a fixture (CSV + manifest, optional extras) into `dir`.
void write_fixture_files(const TableFixture& fixture, const std::filesystem::path& dir,
                         const std::string& stem);
void write_civil_fixture_files(const std::filesystem::path& dir,
                               const CivilFixtureOptions& options = {});

}  // namespace gime
