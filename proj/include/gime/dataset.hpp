#pragma once

// Record datasets: loading, validation, streaming scans, and seeded sampling.
//
// A Dataset is a re-scannable view over a CSV/JSONL file or an in-memory row
// table. File-backed datasets are parsed per scan; nothing is materialized
// beyond the bound fields of the record currently visited, so sources larger
// than memory stream fine. Record order is stable across re-reads.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gime/error.hpp"
#include "gime/manifest.hpp"
#include "gime/rng.hpp"

namespace gime {

enum class Format : uint8_t { Csv, Jsonl };

Format format_from_name(std::string_view name);

// A parsed field value. Timestamps are epoch seconds in the double
// alternative. Monostate marks fields the scan did not need to parse.
using FieldValue = std::variant<std::monostate, std::string, int64_t, double, bool>;

struct Record {
  std::vector<FieldValue> values;  // aligned with manifest schema order

  const FieldValue& at(size_t schema_index) const { return values[schema_index]; }
};

// Canonical string key for distinct-counting and grouping.
std::string field_value_key(const FieldValue& v);
// Numeric view; throws TypeError when the value has no numeric reading.
double field_value_number(const FieldValue& v, uint64_t row);

struct SampleMethod {
  enum class Kind : uint8_t { UniformWithoutReplacement, Reservoir };
};

struct SampleHandle {
  std::vector<uint64_t> indices;  // unique, ascending
  uint64_t seed = 0;
  SampleMethod::Kind method = SampleMethod::Kind::UniformWithoutReplacement;
};

class Dataset {
 public:
  // load_dataset: validates the file against the manifest (one pass), counts
  // records, and checks record-id uniqueness. Zero records is a warning.
  static Dataset open(const std::filesystem::path& path, Format format,
                      DatasetManifest manifest);

  // In-memory table of text cells, one row per record, in schema order.
  // Parsed through the same kind-conversion path as files.
  static Dataset in_memory(DatasetManifest manifest,
                           std::vector<std::vector<std::string>> rows);

  uint64_t record_count() const { return record_count_; }
  const DatasetManifest& manifest() const { return manifest_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool file_backed() const { return !rows_; }
  Format format() const { return format_; }
  const std::filesystem::path& path() const { return path_; }

  // Visit every record in order. `needed` lists the schema indices whose
  // values must be parsed; others arrive as monostate. The row number passed
  // to the callback is the 1-based source line (or row ordinal for in-memory
  // data), for error messages.
  void scan(const std::vector<size_t>& needed,
            const std::function<void(uint64_t index, const Record&, uint64_t row)>&
                visit) const;

  // Visit raw record text (CSV record or JSONL line) for subset copies.
  void scan_raw(
      const std::function<void(uint64_t index, const std::string& raw)>& visit) const;

  // Raw header line (CSV only; empty for JSONL / in-memory).
  const std::string& header_raw() const { return header_raw_; }

  // Schema indices of every field some binding references.
  std::vector<size_t> bound_field_indices() const;

  // Record-id values for the given sorted indices, in order.
  std::vector<std::string> record_ids(const std::vector<uint64_t>& indices) const;

  // Number of full scans taken so far; pins single-pass contracts in tests.
  uint64_t scan_passes() const { return scan_passes_->load(); }

 private:
  Dataset() = default;
  void validate_pass();

  DatasetManifest manifest_;
  std::filesystem::path path_;
  Format format_ = Format::Csv;
  std::optional<std::vector<std::vector<std::string>>> rows_;
  std::vector<size_t> csv_column_of_schema_;  // schema index -> file column
  uint64_t record_count_ = 0;
  std::string header_raw_;
  std::vector<std::string> warnings_;
  std::shared_ptr<std::atomic<uint64_t>> scan_passes_ =
      std::make_shared<std::atomic<uint64_t>>(0);
};

Dataset load_dataset(const std::filesystem::path& path, Format format,
                     const DatasetManifest& manifest);

// Simple random sample without replacement, deterministic in (n, seed).
// n == record_count returns the identity sample. Throws SizeExceedsPool.
SampleHandle draw_uniform(const Dataset& dataset, uint64_t n, uint64_t seed);
SampleHandle draw_uniform(const Dataset& dataset, uint64_t n, Rng& rng);

// Single-pass reservoir sample of min(n, record_count) records. Used for
// pool-metric estimation; callers flag results as estimates.
SampleHandle reservoir_estimate_sample(const Dataset& dataset, uint64_t n,
                                       uint64_t seed);

// Newline-delimited record ids for the sample, in source order.
void write_id_list(const Dataset& dataset, const SampleHandle& handle,
                   std::ostream& out);

// Filtered copy of the source preserving order and raw bytes (CSV keeps the
// header). In-memory datasets are emitted as CSV.
void write_subset_copy(const Dataset& dataset, const SampleHandle& handle,
                       std::ostream& out);

}  // namespace gime
