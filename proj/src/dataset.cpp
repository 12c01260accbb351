#include "gime/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "gime/csv.hpp"
#include "gime/timeparse.hpp"

namespace gime {

using nlohmann::json;

Format format_from_name(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl") return Format::Jsonl;
  throw Error(Errc::BadArgument, "unknown format: " + std::string(name));
}

std::string field_value_key(const FieldValue& v) {
  struct {
    std::string operator()(std::monostate) const { return std::string(); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::ostringstream os;
      os.precision(17);
      os << d;
      return os.str();
    }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } to_key;
  return std::visit(to_key, v);
}

double field_value_number(const FieldValue& v, uint64_t row) {
  if (std::holds_alternative<int64_t>(v)) {
    return static_cast<double>(std::get<int64_t>(v));
  }
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? 1.0 : 0.0;
  throw Error(Errc::TypeError, "value has no numeric reading", row);
}

namespace {

bool parse_bool_text(std::string_view s, bool& out) {
  std::string lower;
  lower.reserve(s.size());
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "true" || lower == "1" || lower == "yes") {
    out = true;
    return true;
  }
  if (lower == "false" || lower == "0" || lower == "no") {
    out = false;
    return true;
  }
  return false;
}

FieldValue parse_cell(const std::string& text, const FieldSpec& spec,
                      double epoch_unit_seconds, uint64_t row) {
  switch (spec.kind) {
    case FieldKind::Text:
      return text;
    case FieldKind::Integer: {
      int64_t value = 0;
      const char* begin = text.data();
      const char* end = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end || text.empty()) {
        throw Error(Errc::TypeError,
                    "field \"" + spec.name + "\": cannot parse \"" + text +
                        "\" as integer at line " + std::to_string(row),
                    row);
      }
      return value;
    }
    case FieldKind::Real: {
      double value = 0;
      const char* begin = text.data();
      const char* end = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end || text.empty()) {
        throw Error(Errc::TypeError,
                    "field \"" + spec.name + "\": cannot parse \"" + text +
                        "\" as real at line " + std::to_string(row),
                    row);
      }
      return value;
    }
    case FieldKind::Timestamp: {
      auto ts = parse_timestamp(text, epoch_unit_seconds);
      if (!ts) {
        throw Error(Errc::TypeError,
                    "field \"" + spec.name + "\": cannot parse \"" + text +
                        "\" as timestamp at line " + std::to_string(row),
                    row);
      }
      return *ts;
    }
    case FieldKind::Boolean: {
      bool value = false;
      if (!parse_bool_text(text, value)) {
        throw Error(Errc::TypeError,
                    "field \"" + spec.name + "\": cannot parse \"" + text +
                        "\" as boolean at line " + std::to_string(row),
                    row);
      }
      return value;
    }
  }
  return std::monostate{};
}

FieldValue parse_json_cell(const json& cell, const FieldSpec& spec,
                           double epoch_unit_seconds, uint64_t row) {
  if (cell.is_string()) return parse_cell(cell.get<std::string>(), spec, epoch_unit_seconds, row);
  switch (spec.kind) {
    case FieldKind::Text: {
      return cell.dump();
    }
    case FieldKind::Integer:
      if (cell.is_number_integer()) return cell.get<int64_t>();
      break;
    case FieldKind::Real:
      if (cell.is_number()) return cell.get<double>();
      break;
    case FieldKind::Timestamp:
      if (cell.is_number()) return cell.get<double>() * epoch_unit_seconds;
      break;
    case FieldKind::Boolean:
      if (cell.is_boolean()) return cell.get<bool>();
      if (cell.is_number_integer()) return cell.get<int64_t>() != 0;
      break;
  }
  throw Error(Errc::TypeError,
              "field \"" + spec.name + "\": JSON value " + cell.dump() +
                  " incompatible with kind " + std::string(field_kind_name(spec.kind)) +
                  " at line " + std::to_string(row),
              row);
}

}  // namespace

Dataset Dataset::open(const std::filesystem::path& path, Format format,
                      DatasetManifest manifest) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
      throw Error(Errc::IoError, "cannot open dataset: " + path.string());
    }
  }
  Dataset d;
  d.manifest_ = std::move(manifest);
  d.path_ = path;
  d.format_ = format;

  for (const auto& issue : validate_manifest(d.manifest_)) {
    if (issue.severity == ManifestIssue::Severity::Error) {
      throw Error(Errc::ManifestInvalid, issue.message);
    }
    d.warnings_.push_back(issue.message);
  }

  if (format == Format::Csv) {
    std::ifstream in(path, std::ios::binary);
    CsvReader reader(in);
    CsvRecord header;
    if (!reader.next(header)) {
      throw Error(Errc::MissingField, "CSV has no header row: " + path.string());
    }
    d.header_raw_ = header.raw;
    d.csv_column_of_schema_.assign(d.manifest_.schema.size(), SIZE_MAX);
    for (size_t s = 0; s < d.manifest_.schema.size(); ++s) {
      const auto& name = d.manifest_.schema[s].name;
      for (size_t c = 0; c < header.fields.size(); ++c) {
        if (header.fields[c] == name) {
          d.csv_column_of_schema_[s] = c;
          break;
        }
      }
    }
    // Fields referenced by bindings must exist in the file.
    for (size_t s : d.bound_field_indices()) {
      if (d.csv_column_of_schema_[s] == SIZE_MAX) {
        throw Error(Errc::MissingField,
                    "bound field \"" + d.manifest_.schema[s].name +
                        "\" missing from CSV header");
      }
    }
  }

  d.validate_pass();
  return d;
}

Dataset Dataset::in_memory(DatasetManifest manifest,
                           std::vector<std::vector<std::string>> rows) {
  Dataset d;
  d.manifest_ = std::move(manifest);
  d.rows_ = std::move(rows);
  d.csv_column_of_schema_.resize(d.manifest_.schema.size());
  for (size_t s = 0; s < d.manifest_.schema.size(); ++s) d.csv_column_of_schema_[s] = s;
  for (const auto& issue : validate_manifest(d.manifest_)) {
    if (issue.severity == ManifestIssue::Severity::Error) {
      throw Error(Errc::ManifestInvalid, issue.message);
    }
    d.warnings_.push_back(issue.message);
  }
  d.validate_pass();
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, Format format,
                     const DatasetManifest& manifest) {
  return Dataset::open(path, format, manifest);
}

std::vector<size_t> Dataset::bound_field_indices() const {
  std::set<size_t> wanted;
  auto add = [&](const std::optional<std::string>& name) {
    if (!name) return;
    if (auto idx = manifest_.field_index(*name)) wanted.insert(*idx);
  };
  if (auto idx = manifest_.field_index(manifest_.record_id_field)) wanted.insert(*idx);
  add(manifest_.event_time_field);
  add(manifest_.collection_time_field);
  add(manifest_.scope_field);
  add(manifest_.variety_field);
  add(manifest_.granularity_field);
  add(manifest_.aggregation_field);
  add(manifest_.coverage_field);
  add(manifest_.distortion_field);
  add(manifest_.label_field);
  if (manifest_.feature_list) {
    for (const auto& f : *manifest_.feature_list) add(std::optional(f));
  }
  if (manifest_.truth_reference) {
    add(std::optional(manifest_.truth_reference->join_key));
    add(std::optional(manifest_.truth_reference->compare_field));
  }
  return {wanted.begin(), wanted.end()};
}

void Dataset::scan(
    const std::vector<size_t>& needed,
    const std::function<void(uint64_t, const Record&, uint64_t)>& visit) const {
  scan_passes_->fetch_add(1);
  Record record;
  record.values.resize(manifest_.schema.size());

  auto emit_row = [&](uint64_t index, uint64_t row,
                      const std::function<const std::string*(size_t)>& cell_of) {
    for (auto& v : record.values) v = std::monostate{};
    for (size_t s : needed) {
      const std::string* cell = cell_of(s);
      if (!cell) {
        throw Error(Errc::MissingField,
                    "bound field \"" + manifest_.schema[s].name +
                        "\" missing at line " + std::to_string(row),
                    row);
      }
      record.values[s] =
          parse_cell(*cell, manifest_.schema[s], manifest_.epoch_unit.seconds, row);
    }
    visit(index, record, row);
  };

  if (rows_) {
    for (uint64_t i = 0; i < rows_->size(); ++i) {
      const auto& cells = (*rows_)[i];
      emit_row(i, i + 1, [&](size_t s) -> const std::string* {
        return s < cells.size() ? &cells[s] : nullptr;
      });
    }
    return;
  }

  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open dataset: " + path_.string());

  if (format_ == Format::Csv) {
    CsvReader reader(in);
    CsvRecord rec;
    reader.next(rec);  // header
    uint64_t index = 0;
    while (reader.next(rec)) {
      if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;  // blank line
      emit_row(index, rec.line, [&](size_t s) -> const std::string* {
        const size_t col = csv_column_of_schema_[s];
        return col != SIZE_MAX && col < rec.fields.size() ? &rec.fields[col] : nullptr;
      });
      ++index;
    }
    return;
  }

  // JSONL
  std::string line;
  uint64_t line_no = 0;
  uint64_t index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::TypeError,
                  "invalid JSON at line " + std::to_string(line_no) + ": " + e.what(),
                  line_no);
    }
    for (auto& v : record.values) v = std::monostate{};
    for (size_t s : needed) {
      const auto& name = manifest_.schema[s].name;
      if (!obj.contains(name) || obj[name].is_null()) {
        throw Error(Errc::MissingField,
                    "bound field \"" + name + "\" missing at line " +
                        std::to_string(line_no),
                    line_no);
      }
      record.values[s] = parse_json_cell(obj[name], manifest_.schema[s],
                                         manifest_.epoch_unit.seconds, line_no);
    }
    visit(index, record, line_no);
    ++index;
  }
}

void Dataset::scan_raw(
    const std::function<void(uint64_t, const std::string&)>& visit) const {
  scan_passes_->fetch_add(1);
  if (rows_) {
    for (uint64_t i = 0; i < rows_->size(); ++i) {
      visit(i, csv_join((*rows_)[i]));
    }
    return;
  }
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open dataset: " + path_.string());
  if (format_ == Format::Csv) {
    CsvReader reader(in);
    CsvRecord rec;
    reader.next(rec);  // header
    uint64_t index = 0;
    while (reader.next(rec)) {
      if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
      visit(index++, rec.raw);
    }
    return;
  }
  std::string line;
  uint64_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    visit(index++, line);
  }
}

void Dataset::validate_pass() {
  const auto needed = bound_field_indices();
  const size_t id_index = *manifest_.field_index(manifest_.record_id_field);
  std::unordered_set<std::string> seen_ids;
  uint64_t count = 0;
  std::optional<uint64_t> duplicate_row;
  std::string duplicate_id;
  scan(needed, [&](uint64_t, const Record& r, uint64_t row) {
    ++count;
    auto id = field_value_key(r.at(id_index));
    if (!seen_ids.insert(id).second && !duplicate_row) {
      duplicate_row = row;
      duplicate_id = id;
    }
  });
  if (duplicate_row) {
    throw Error(Errc::TypeError,
                "duplicate record_id \"" + duplicate_id + "\" at line " +
                    std::to_string(*duplicate_row),
                *duplicate_row);
  }
  record_count_ = count;
  if (count == 0) {
    warnings_.push_back("dataset has zero records");
  }
}

std::vector<std::string> Dataset::record_ids(
    const std::vector<uint64_t>& indices) const {
  const size_t id_index = *manifest_.field_index(manifest_.record_id_field);
  std::vector<std::string> out;
  out.reserve(indices.size());
  size_t cursor = 0;
  scan({id_index}, [&](uint64_t index, const Record& r, uint64_t) {
    if (cursor < indices.size() && indices[cursor] == index) {
      out.push_back(field_value_key(r.at(id_index)));
      ++cursor;
    }
  });
  return out;
}

SampleHandle draw_uniform(const Dataset& dataset, uint64_t n, Rng& rng) {
  if (n > dataset.record_count()) {
    throw Error(Errc::SizeExceedsPool,
                "sample size " + std::to_string(n) + " exceeds pool of " +
                    std::to_string(dataset.record_count()));
  }
  SampleHandle handle;
  handle.method = SampleMethod::Kind::UniformWithoutReplacement;
  handle.indices = sample_without_replacement(dataset.record_count(), n, rng);
  return handle;
}

SampleHandle draw_uniform(const Dataset& dataset, uint64_t n, uint64_t seed) {
  Rng rng(seed);
  SampleHandle handle = draw_uniform(dataset, n, rng);
  handle.seed = seed;
  return handle;
}

SampleHandle reservoir_estimate_sample(const Dataset& dataset, uint64_t n,
                                       uint64_t seed) {
  if (n < 1) throw Error(Errc::BadArgument, "reservoir size must be >= 1");
  Rng rng(seed);
  std::vector<uint64_t> reservoir;
  reservoir.reserve(std::min<uint64_t>(n, dataset.record_count()));
  dataset.scan_raw([&](uint64_t index, const std::string&) {
    if (index < n) {
      reservoir.push_back(index);
    } else {
      const uint64_t j = rng.bounded(index + 1);
      if (j < n) reservoir[j] = index;
    }
  });
  std::sort(reservoir.begin(), reservoir.end());
  SampleHandle handle;
  handle.method = SampleMethod::Kind::Reservoir;
  handle.seed = seed;
  handle.indices = std::move(reservoir);
  return handle;
}

void write_id_list(const Dataset& dataset, const SampleHandle& handle,
                   std::ostream& out) {
  for (const auto& id : dataset.record_ids(handle.indices)) {
    out << id << '\n';
  }
}

void write_subset_copy(const Dataset& dataset, const SampleHandle& handle,
                       std::ostream& out) {
  if (dataset.format() == Format::Csv || !dataset.file_backed()) {
    if (!dataset.header_raw().empty()) {
      out << dataset.header_raw() << '\n';
    } else if (!dataset.file_backed()) {
      std::vector<std::string> names;
      for (const auto& f : dataset.manifest().schema) names.push_back(f.name);
      out << csv_join(names) << '\n';
    }
  }
  size_t cursor = 0;
  dataset.scan_raw([&](uint64_t index, const std::string& raw) {
    if (cursor < handle.indices.size() && handle.indices[cursor] == index) {
      out << raw << '\n';
      ++cursor;
    }
  });
}

}  // namespace gime
