#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gime/dataset.hpp"
#include "gime/digest.hpp"
#include "gime/metrics.hpp"
#include "helpers.hpp"

using namespace gime;
using test_helpers::scratch_dir;
using test_helpers::write_file;

TEST_SUITE_BEGIN("dataset");

namespace {

DatasetManifest basic_manifest() {
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Text},
              {"when", FieldKind::Timestamp},
              {"region", FieldKind::Text},
              {"score", FieldKind::Real}};
  m.record_id_field = "id";
  m.event_time_field = "when";
  m.scope_field = "region";
  m.epoch_unit = TimeQuantity::from_unit_name("second");
  return m;
}

}  // namespace

TEST_CASE("well-formed CSV loads with the right count") {
  auto dir = scratch_dir("csv");
  auto path = write_file(dir, "d.csv",
                         "id,when,region,score\n"
                         "a,2020-01-01,north,1.5\n"
                         "b,2020-01-02,south,2.5\n"
                         "c,2020-01-03,north,3.5\n");
  auto d = load_dataset(path, Format::Csv, basic_manifest());
  CHECK(d.record_count() == 3);
}

TEST_CASE("CSV missing a bound column names it") {
  auto dir = scratch_dir("missing");
  auto path = write_file(dir, "d.csv",
                         "id,when,score\n"
                         "a,2020-01-01,1.5\n");
  try {
    load_dataset(path, Format::Csv, basic_manifest());
    FAIL("expected MissingField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingField);
    CHECK(std::string(e.what()).find("region") != std::string::npos);
  }
}

TEST_CASE("JSONL bad timestamp cites the line") {
  auto dir = scratch_dir("jsonl");
  std::string lines;
  for (int i = 1; i <= 6; ++i) {
    lines += "{\"id\":\"r" + std::to_string(i) +
             "\",\"when\":\"2020-01-01\",\"region\":\"x\",\"score\":1}\n";
  }
  lines += "{\"id\":\"r7\",\"when\":\"not-a-date\",\"region\":\"x\",\"score\":1}\n";
  auto path = write_file(dir, "d.jsonl", lines);
  try {
    load_dataset(path, Format::Jsonl, basic_manifest());
    FAIL("expected TypeError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TypeError);
    REQUIRE(e.row().has_value());
    CHECK(*e.row() == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("zero records is a warning, not an error") {
  auto dir = scratch_dir("empty");
  auto path = write_file(dir, "d.csv", "id,when,region,score\n");
  auto d = load_dataset(path, Format::Csv, basic_manifest());
  CHECK(d.record_count() == 0);
  bool warned = false;
  for (const auto& w : d.warnings()) {
    if (w.find("zero records") != std::string::npos) warned = true;
  }
  CHECK(warned);
}

TEST_CASE("duplicate record ids are rejected") {
  auto dir = scratch_dir("dupe");
  auto path = write_file(dir, "d.csv",
                         "id,when,region,score\n"
                         "a,2020-01-01,north,1\n"
                         "a,2020-01-02,south,2\n");
  CHECK_THROWS_AS(load_dataset(path, Format::Csv, basic_manifest()), Error);
}

TEST_CASE("quoted fields, embedded commas and newlines survive a raw round trip") {
  auto dir = scratch_dir("quotes");
  const std::string body =
      "id,when,region,score\n"
      "a,2020-01-01,\"north,east\",1\n"
      "b,2020-01-02,\"two\nlines\",2\n";
  auto path = write_file(dir, "d.csv", body);
  auto d = load_dataset(path, Format::Csv, basic_manifest());
  CHECK(d.record_count() == 2);

  std::vector<std::string> regions;
  const size_t region_idx = 2;
  d.scan({region_idx}, [&](uint64_t, const Record& r, uint64_t) {
    regions.push_back(std::get<std::string>(r.at(region_idx)));
  });
  REQUIRE(regions.size() == 2);
  CHECK(regions[0] == "north,east");
  CHECK(regions[1] == "two\nlines");

  SampleHandle all;
  all.indices = {0, 1};
  std::ostringstream copy;
  write_subset_copy(d, all, copy);
  CHECK(copy.str() == body);
}

TEST_CASE("re-reads stream the identical record sequence") {
  auto dir = scratch_dir("reread");
  std::string body = "id,when,region,score\n";
  for (int i = 0; i < 200; ++i) {
    body += "r" + std::to_string(i) + ",2020-01-01,reg" + std::to_string(i % 7) +
            "," + std::to_string(i) + ".25\n";
  }
  auto path = write_file(dir, "d.csv", body);
  auto d = load_dataset(path, Format::Csv, basic_manifest());

  auto scan_digest = [&]() {
    std::string all;
    d.scan_raw([&](uint64_t, const std::string& raw) {
      all += raw;
      all += '\n';
    });
    return hex_digest(all);
  };
  CHECK(scan_digest() == scan_digest());
}

TEST_CASE("draw_uniform honors the identity and empty edges") {
  auto dir = scratch_dir("draw");
  std::string body = "id,when,region,score\n";
  for (int i = 0; i < 10; ++i) {
    body += "r" + std::to_string(i) + ",2020-01-01,x,1\n";
  }
  auto path = write_file(dir, "d.csv", body);
  auto d = load_dataset(path, Format::Csv, basic_manifest());

  auto identity = draw_uniform(d, 10, 1);
  REQUIRE(identity.indices.size() == 10);
  for (uint64_t i = 0; i < 10; ++i) CHECK(identity.indices[i] == i);

  auto empty = draw_uniform(d, 0, 1);
  CHECK(empty.indices.empty());

  CHECK_THROWS_AS(draw_uniform(d, 11, 1), Error);

  // Frozen: same seed, same indices, every run.
  auto frozen = draw_uniform(d, 5, 42);
  CHECK(frozen.indices == std::vector<uint64_t>{1, 2, 3, 7, 8});
  CHECK(draw_uniform(d, 5, 42).indices == frozen.indices);
}

TEST_CASE("reservoir sampling is deterministic and single-pass") {
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Text}, {"label", FieldKind::Integer}};
  m.record_id_field = "id";

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 5000; ++i) {
    rows.push_back({"r" + std::to_string(i), std::to_string(i % 2)});
  }
  auto d = Dataset::in_memory(m, rows);

  const uint64_t passes_before = d.scan_passes();
  auto a = reservoir_estimate_sample(d, 100, 9);
  CHECK(d.scan_passes() == passes_before + 1);  // exactly one pass per draw

  auto b = reservoir_estimate_sample(d, 100, 9);
  CHECK(a.indices == b.indices);
  CHECK(a.indices.size() == 100);

  auto all = reservoir_estimate_sample(d, 10000, 9);
  CHECK(all.indices.size() == 5000);
}

TEST_CASE("JSONL datasets compute metrics like CSV ones") {
  auto dir = scratch_dir("jsonl_ok");
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Text},
              {"region", FieldKind::Text},
              {"label", FieldKind::Integer}};
  m.record_id_field = "id";
  m.scope_field = "region";
  m.label_field = "label";
  m.mismatch_target = MismatchTarget{true, 0.5, {}};

  auto path = write_file(dir, "d.jsonl",
                         "{\"id\":\"a\",\"region\":\"north\",\"label\":1}\n"
                         "{\"id\":\"b\",\"region\":\"south\",\"label\":0}\n"
                         "{\"id\":\"c\",\"region\":\"north\",\"label\":1}\n"
                         "{\"id\":\"d\",\"region\":\"east\",\"label\":0}\n");
  auto d = load_dataset(path, Format::Jsonl, m);
  CHECK(d.record_count() == 4);
  auto metrics = compute_all(d).metrics;
  CHECK(metrics.get(MetricId::Scope) == 3.0);
  CHECK(metrics.get(MetricId::Mismatch) == 0.0);

  SampleHandle pick;
  pick.indices = {1, 3};
  std::ostringstream copy;
  write_subset_copy(d, pick, copy);
  CHECK(copy.str() ==
        "{\"id\":\"b\",\"region\":\"south\",\"label\":0}\n"
        "{\"id\":\"d\",\"region\":\"east\",\"label\":0}\n");
}

TEST_CASE("reservoir label-rate estimate obeys the binomial error bound") {
  // 1000-record reservoir over a million 50/50-labeled records: the
  // estimated positive rate lands within 0.05 of 0.5 except with
  // probability ~0.0016 per seed (|z| > 3.16). Over 40 fixed seeds, two
  // misses would already be a >5-sigma surprise.
  DatasetManifest m;
  m.schema = {{"id", FieldKind::Integer}, {"label", FieldKind::Integer}};
  m.record_id_field = "id";

  const uint64_t n = 1000000;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    rows.push_back({std::to_string(i), i % 2 == 0 ? "1" : "0"});
  }
  auto d = Dataset::in_memory(m, rows);

  int misses = 0;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    auto handle = reservoir_estimate_sample(d, 1000, seed);
    uint64_t positives = 0;
    for (uint64_t idx : handle.indices) {
      if (idx % 2 == 0) ++positives;
    }
    const double rate = static_cast<double>(positives) / 1000.0;
    if (std::abs(rate - 0.5) > 0.05) ++misses;
  }
  CHECK(misses <= 1);
}

TEST_CASE("id list export preserves source order") {
  auto dir = scratch_dir("ids");
  auto path = write_file(dir, "d.csv",
                         "id,when,region,score\n"
                         "alpha,2020-01-01,x,1\n"
                         "beta,2020-01-02,x,1\n"
                         "gamma,2020-01-03,x,1\n");
  auto d = load_dataset(path, Format::Csv, basic_manifest());
  SampleHandle pick;
  pick.indices = {0, 2};
  std::ostringstream ids;
  write_id_list(d, pick, ids);
  CHECK(ids.str() == "alpha\ngamma\n");
}

TEST_SUITE_END();
