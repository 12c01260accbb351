#include "gime/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gime/csv.hpp"

namespace gime {

DistinctCounter::DistinctCounter(const MetricsOptions& opts) {
  if (opts.distinct_mode == DistinctMode::Sketch) {
    sketch_ = std::make_shared<HllSketch>(opts.sketch_precision);
  }
}

void DistinctCounter::add(const std::string& key) {
  if (sketch_) {
    sketch_->add(key);
  } else {
    exact_.insert(key);
  }
}

void DistinctCounter::merge(const DistinctCounter& other) {
  if (sketch_ && other.sketch_) {
    sketch_->merge(*other.sketch_);
    return;
  }
  for (const auto& v : other.exact_) exact_.insert(v);
}

double DistinctCounter::count() const {
  if (sketch_) return std::round(sketch_->estimate());
  return static_cast<double>(exact_.size());
}

bool DistinctCounter::contains(const std::string& key) const {
  return exact_.count(key) > 0;
}

AspectMask AspectMask::all() {
  AspectMask m;
  m.volume = m.delay = m.scope = m.granularity = m.variety = m.duration =
      m.sampling_rate = m.aggregation = m.coverage = m.distortion = m.mismatch =
          true;
  return m;
}

AspectMask AspectMask::only(MetricId id) {
  AspectMask m;
  switch (id) {
    case MetricId::Volume: m.volume = true; break;
    case MetricId::Delay: m.delay = true; break;
    case MetricId::Scope: m.scope = true; break;
    case MetricId::Granularity: m.granularity = true; break;
    case MetricId::Variety: m.variety = true; break;
    case MetricId::Duration: m.duration = true; break;
    case MetricId::SamplingRate: m.sampling_rate = true; break;
    case MetricId::Aggregation: m.aggregation = true; break;
    case MetricId::Coverage: m.coverage = true; break;
    case MetricId::Distortion: m.distortion = true; break;
    case MetricId::Mismatch: m.mismatch = true; break;
  }
  return m;
}

namespace {

struct BoundIndices {
  std::optional<size_t> event_time, collection_time, scope, variety, granularity,
      aggregation, coverage, distortion, label, truth_join, truth_compare;
};

BoundIndices resolve_indices(const DatasetManifest& m) {
  BoundIndices b;
  auto idx = [&](const std::optional<std::string>& name) -> std::optional<size_t> {
    if (!name) return std::nullopt;
    return m.field_index(*name);
  };
  b.event_time = idx(m.event_time_field);
  b.collection_time = idx(m.collection_time_field);
  b.scope = idx(m.scope_field);
  b.variety = idx(m.variety_field);
  b.granularity = idx(m.granularity_field);
  b.aggregation = idx(m.aggregation_field);
  b.coverage = idx(m.coverage_field);
  b.distortion = idx(m.distortion_field);
  b.label = idx(m.label_field);
  if (m.truth_reference) {
    b.truth_join = idx(std::optional(m.truth_reference->join_key));
    b.truth_compare = idx(std::optional(m.truth_reference->compare_field));
  }
  return b;
}

std::vector<size_t> needed_fields(const DatasetManifest& m, const AspectMask& mask) {
  std::set<size_t> wanted;
  const BoundIndices b = resolve_indices(m);
  auto put = [&](const std::optional<size_t>& i) {
    if (i) wanted.insert(*i);
  };
  if (mask.delay || mask.duration || mask.sampling_rate) put(b.event_time);
  if (mask.delay) put(b.collection_time);
  if (mask.scope || mask.sampling_rate) put(b.scope);
  if (mask.variety) put(b.variety);
  if (mask.granularity) put(b.granularity);
  if (mask.aggregation) put(b.aggregation);
  if (mask.coverage) put(b.coverage);
  if (mask.distortion) {
    put(b.distortion);
    put(b.truth_join);
    put(b.truth_compare);
  }
  if (mask.mismatch) put(b.label);
  return {wanted.begin(), wanted.end()};
}

bool binary_label_truth(const FieldValue& v, uint64_t row) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v) != 0;
  if (std::holds_alternative<std::string>(v)) {
    const auto& s = std::get<std::string>(v);
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
  }
  throw Error(Errc::UnknownLabel,
              "label value \"" + field_value_key(v) +
                  "\" not interpretable as binary at line " + std::to_string(row),
              row);
}

using TruthMap = std::unordered_map<std::string, std::string>;

TruthMap load_truth_map(const TruthReference& ref, double epoch_unit_seconds) {
  (void)epoch_unit_seconds;
  TruthMap map;
  std::ifstream in(ref.path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open truth reference: " + ref.path);
  if (ref.format == "jsonl") {
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::TypeError,
                    "truth reference: invalid JSON at line " +
                        std::to_string(line_no) + ": " + e.what(),
                    line_no);
      }
      if (!obj.contains(ref.ref_id) || !obj.contains(ref.ref_field)) continue;
      const auto key = obj[ref.ref_id].is_string()
                           ? obj[ref.ref_id].get<std::string>()
                           : obj[ref.ref_id].dump();
      const auto value = obj[ref.ref_field].is_string()
                             ? obj[ref.ref_field].get<std::string>()
                             : obj[ref.ref_field].dump();
      map[key] = value;
    }
    return map;
  }
  CsvReader reader(in);
  CsvRecord header;
  if (!reader.next(header)) {
    throw Error(Errc::MissingField, "truth reference has no header: " + ref.path);
  }
  std::optional<size_t> id_col, value_col;
  for (size_t c = 0; c < header.fields.size(); ++c) {
    if (header.fields[c] == ref.ref_id) id_col = c;
    if (header.fields[c] == ref.ref_field) value_col = c;
  }
  if (!id_col || !value_col) {
    throw Error(Errc::MissingField,
                "truth reference missing column \"" +
                    (id_col ? ref.ref_field : ref.ref_id) + "\"");
  }
  CsvRecord rec;
  while (reader.next(rec)) {
    if (rec.fields.size() <= std::max(*id_col, *value_col)) continue;
    map[rec.fields[*id_col]] = rec.fields[*value_col];
  }
  return map;
}

}  // namespace

PartialMetricState MetricsEngine::build_state(
    const Dataset& dataset, const std::vector<uint64_t>& indices,
    const AspectMask& mask) const {
  return build_state_impl(dataset, &indices, mask);
}

PartialMetricState MetricsEngine::build_state_impl(
    const Dataset& dataset, const std::vector<uint64_t>* indices,
    const AspectMask& mask) const {
  const DatasetManifest& m = dataset.manifest();
  const BoundIndices b = resolve_indices(m);

  PartialMetricState st;
  st.manifest_digest = m.digest();
  st.scope_values = DistinctCounter(options_);
  st.variety_values = DistinctCounter(options_);
  st.coverage_values = DistinctCounter(options_);

  std::optional<TruthMap> truth;
  const bool use_truth =
      mask.distortion && !m.distortion_field && m.truth_reference.has_value();
  if (use_truth) {
    truth = load_truth_map(*m.truth_reference, m.epoch_unit.seconds);
  }

  std::unordered_set<std::string> universe;
  if (mask.coverage && m.coverage_universe) {
    universe.insert(m.coverage_universe->begin(), m.coverage_universe->end());
  }
  std::unordered_set<std::string> offender_seen;

  size_t cursor = 0;

  auto visit = [&](uint64_t index, const Record& r, uint64_t row) {
    if (indices) {
      if (cursor >= indices->size() || (*indices)[cursor] != index) return;
      ++cursor;
    }
    st.record_count += 1;

    std::optional<double> event_seconds;
    if (b.event_time && (mask.delay || mask.duration || mask.sampling_rate)) {
      event_seconds = field_value_number(r.at(*b.event_time), row);
    }

    if (mask.delay && b.event_time && b.collection_time) {
      const double collected = field_value_number(r.at(*b.collection_time), row);
      const double lag = collected - *event_seconds;
      if (lag < 0) {
        throw Error(Errc::NegativeDelay,
                    "collection_time precedes event_time at line " +
                        std::to_string(row),
                    row);
      }
      st.max_delay_seconds = st.max_delay_seconds
                                 ? std::max(*st.max_delay_seconds, lag)
                                 : lag;
    }

    if (mask.scope && b.scope && !m.scope_constant) {
      st.scope_values.add(field_value_key(r.at(*b.scope)));
    }

    if (mask.granularity && b.granularity && !m.granularity_constant) {
      const double g = field_value_number(r.at(*b.granularity), row);
      if (g <= 0) {
        throw Error(Errc::NonPositiveGranularity,
                    "granularity value " + std::to_string(g) +
                        " at line " + std::to_string(row),
                    row);
      }
      st.granularity_sum += g;
      st.granularity_count += 1;
    }

    if (mask.variety && b.variety && !m.feature_list) {
      st.variety_values.add(field_value_key(r.at(*b.variety)));
    }

    if ((mask.duration || mask.sampling_rate) && event_seconds) {
      st.min_event_seconds = st.min_event_seconds
                                 ? std::min(*st.min_event_seconds, *event_seconds)
                                 : *event_seconds;
      st.max_event_seconds = st.max_event_seconds
                                 ? std::max(*st.max_event_seconds, *event_seconds)
                                 : *event_seconds;
      if (mask.duration && m.duration_mode == DurationMode::BucketUnion &&
          m.bucket_size) {
        st.occupied_buckets.insert(static_cast<int64_t>(
            std::floor(*event_seconds / m.bucket_size->seconds)));
      }
      if (mask.sampling_rate && m.nominal_sampling_interval) {
        const std::string group =
            b.scope ? field_value_key(r.at(*b.scope)) : std::string();
        auto& g = st.sampling_groups[group];
        if (g.count == 0) {
          g.min_time = g.max_time = *event_seconds;
        } else {
          g.min_time = std::min(g.min_time, *event_seconds);
          g.max_time = std::max(g.max_time, *event_seconds);
        }
        g.count += 1;
      }
    }

    if (mask.aggregation && b.aggregation) {
      st.aggregation_counts[field_value_key(r.at(*b.aggregation))] += 1;
    }

    if (mask.coverage && b.coverage && m.coverage_universe) {
      const auto key = field_value_key(r.at(*b.coverage));
      if (universe.count(key)) {
        st.coverage_values.add(key);
      } else if (offender_seen.insert(key).second &&
                 st.coverage_offenders.size() < 16) {
        st.coverage_offenders.push_back(key);
      }
    }

    if (mask.distortion) {
      if (b.distortion) {
        st.distortion_sum += field_value_number(r.at(*b.distortion), row);
        st.distortion_count += 1;
      } else if (truth) {
        const auto key = field_value_key(r.at(*b.truth_join));
        auto it = truth->find(key);
        if (it == truth->end()) {
          st.truth_missed += 1;
        } else {
          st.truth_matched += 1;
          if (m.truth_reference->numeric) {
            const double x = field_value_number(r.at(*b.truth_compare), row);
            double t = 0;
            try {
              t = std::stod(it->second);
            } catch (const std::exception&) {
              throw Error(Errc::TypeError,
                          "truth reference value \"" + it->second +
                              "\" is not numeric (join key " + key + ")",
                          row);
            }
            const double scale = std::abs(t) > 0 ? std::abs(t) : 1.0;
            st.truth_deviation_sum += std::abs(x - t) / scale;
          } else {
            st.truth_deviation_sum +=
                field_value_key(r.at(*b.truth_compare)) == it->second ? 0.0 : 1.0;
          }
        }
      }
    }

    if (mask.mismatch && b.label && m.mismatch_target) {
      if (m.mismatch_target->binary) {
        st.label_counts[binary_label_truth(r.at(*b.label), row) ? "1" : "0"] += 1;
      } else {
        const auto key = field_value_key(r.at(*b.label));
        if (!m.mismatch_target->distribution.count(key)) {
          throw Error(Errc::UnknownLabel,
                      "label \"" + key + "\" outside mismatch target support at line " +
                          std::to_string(row),
                      row);
        }
        st.label_counts[key] += 1;
      }
    }
  };

  dataset.scan(needed_fields(m, mask), visit);
  return st;
}

PartialMetricState MetricsEngine::build_state(const Dataset& dataset,
                                              const AspectMask& mask) const {
  // Parallel partials pay off only when records are already materialized;
  // a file-backed source would be re-parsed once per worker.
  if (options_.threads > 1 && !dataset.file_backed() && dataset.record_count() > 1) {
    const uint64_t n = dataset.record_count();
    const unsigned workers =
        static_cast<unsigned>(std::min<uint64_t>(options_.threads, n));
    std::vector<PartialMetricState> parts(workers);
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const uint64_t begin = n * w / workers;
        const uint64_t end = n * (w + 1) / workers;
        try {
          parts[w] = build_state_range(dataset, begin, end, mask);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (unsigned w = 0; w < workers; ++w) {
      if (failures[w]) std::rethrow_exception(failures[w]);
    }
    PartialMetricState merged = std::move(parts[0]);
    for (unsigned w = 1; w < workers; ++w) {
      merged = merge_partials(merged, parts[w]);
    }
    return merged;
  }
  return build_state_impl(dataset, nullptr, mask);
}

PartialMetricState MetricsEngine::build_state_range(const Dataset& dataset,
                                                    uint64_t begin, uint64_t end,
                                                    const AspectMask& mask) const {
  std::vector<uint64_t> indices;
  indices.reserve(end - begin);
  for (uint64_t i = begin; i < end; ++i) indices.push_back(i);
  return build_state(dataset, indices, mask);
}

PartialMetricState merge_partials(const PartialMetricState& a,
                                  const PartialMetricState& b) {
  if (a.manifest_digest != b.manifest_digest) {
    throw Error(Errc::ManifestMismatch,
                "partial states were built under different manifests");
  }
  PartialMetricState out = a;
  out.record_count += b.record_count;
  if (b.max_delay_seconds) {
    out.max_delay_seconds = out.max_delay_seconds
                                ? std::max(*out.max_delay_seconds, *b.max_delay_seconds)
                                : *b.max_delay_seconds;
  }
  out.scope_values.merge(b.scope_values);
  out.variety_values.merge(b.variety_values);
  if (b.min_event_seconds) {
    out.min_event_seconds = out.min_event_seconds
                                ? std::min(*out.min_event_seconds, *b.min_event_seconds)
                                : *b.min_event_seconds;
  }
  if (b.max_event_seconds) {
    out.max_event_seconds = out.max_event_seconds
                                ? std::max(*out.max_event_seconds, *b.max_event_seconds)
                                : *b.max_event_seconds;
  }
  for (int64_t bucket : b.occupied_buckets) out.occupied_buckets.insert(bucket);
  out.granularity_sum += b.granularity_sum;
  out.granularity_count += b.granularity_count;
  for (const auto& [k, v] : b.aggregation_counts) out.aggregation_counts[k] += v;
  out.coverage_values.merge(b.coverage_values);
  for (const auto& offender : b.coverage_offenders) {
    if (out.coverage_offenders.size() >= 16) break;
    if (std::find(out.coverage_offenders.begin(), out.coverage_offenders.end(),
                  offender) == out.coverage_offenders.end()) {
      out.coverage_offenders.push_back(offender);
    }
  }
  out.distortion_sum += b.distortion_sum;
  out.distortion_count += b.distortion_count;
  out.truth_matched += b.truth_matched;
  out.truth_missed += b.truth_missed;
  out.truth_deviation_sum += b.truth_deviation_sum;
  for (const auto& [k, v] : b.label_counts) out.label_counts[k] += v;
  for (const auto& [k, g] : b.sampling_groups) {
    auto& mine = out.sampling_groups[k];
    if (mine.count == 0) {
      mine = g;
    } else {
      mine.min_time = std::min(mine.min_time, g.min_time);
      mine.max_time = std::max(mine.max_time, g.max_time);
      mine.count += g.count;
    }
  }
  for (const auto& w : b.warnings) out.warnings.push_back(w);
  return out;
}

MetricsEngine::FinalizeResult MetricsEngine::finalize(
    const PartialMetricState& st, const DatasetManifest& m,
    const AspectMask& mask) const {
  FinalizeResult result;
  result.warnings = st.warnings;
  MetricVector& v = result.metrics;
  auto note = [&](MetricId id, const std::string& text) {
    result.annotations[std::string(metric_name(id))] = text;
  };

  const bool empty = st.record_count == 0;

  if (mask.volume) {
    v.set(MetricId::Volume, static_cast<double>(st.record_count));
  }

  if (mask.delay) {
    if (empty) {
      v.set(MetricId::Delay, 0.0);
    } else if (m.event_time_field && m.collection_time_field) {
      v.set(MetricId::Delay,
            (st.max_delay_seconds ? *st.max_delay_seconds : 0.0) /
                m.time_unit.seconds);
    } else {
      v.set(MetricId::Delay, 0.0);
      note(MetricId::Delay, "assumed zero delay: time bindings incomplete");
    }
  }

  if (mask.scope && !empty) {
    if (m.scope_constant) {
      v.set(MetricId::Scope, *m.scope_constant);
      note(MetricId::Scope, "manifest constant");
    } else if (m.scope_field) {
      v.set(MetricId::Scope, st.scope_values.count());
      if (st.scope_values.sketched()) note(MetricId::Scope, "sketch estimate");
    }
  }

  if (mask.granularity && !empty) {
    if (m.granularity_constant) {
      v.set(MetricId::Granularity, *m.granularity_constant);
      note(MetricId::Granularity, "manifest constant");
    } else if (m.granularity_field && st.granularity_count > 0) {
      v.set(MetricId::Granularity,
            st.granularity_sum / static_cast<double>(st.granularity_count));
    }
  }

  if (mask.variety && !empty) {
    if (m.feature_list) {
      v.set(MetricId::Variety, static_cast<double>(m.feature_list->size()));
      note(MetricId::Variety, "bound feature count");
    } else if (m.variety_field) {
      v.set(MetricId::Variety, st.variety_values.count());
      if (st.variety_values.sketched()) note(MetricId::Variety, "sketch estimate");
    }
  }

  if (mask.duration) {
    if (empty) {
      v.set(MetricId::Duration, 0.0);
    } else if (m.event_time_field) {
      if (m.duration_mode == DurationMode::BucketUnion && m.bucket_size) {
        v.set(MetricId::Duration,
              static_cast<double>(st.occupied_buckets.size()) *
                  m.bucket_size->seconds / m.time_unit.seconds);
      } else if (st.min_event_seconds && st.max_event_seconds) {
        v.set(MetricId::Duration,
              (*st.max_event_seconds - *st.min_event_seconds) / m.time_unit.seconds);
      }
    }
  }

  if (mask.sampling_rate && !empty && m.event_time_field &&
      m.nominal_sampling_interval && !st.sampling_groups.empty()) {
    const double interval = m.nominal_sampling_interval->seconds;
    double rate_sum = 0;
    uint64_t zero_span_groups = 0;
    for (const auto& [key, g] : st.sampling_groups) {
      const double span = g.max_time - g.min_time;
      if (span < interval) {
        rate_sum += 1.0;
        ++zero_span_groups;
      } else {
        rate_sum += static_cast<double>(g.count - 1) * interval / span;
      }
    }
    v.set(MetricId::SamplingRate,
          rate_sum / static_cast<double>(st.sampling_groups.size()));
    if (zero_span_groups > 0) {
      result.warnings.push_back(
          std::to_string(zero_span_groups) +
          " sampling group(s) span less than one nominal interval; counted as fully sampled");
      note(MetricId::SamplingRate, "zero-span groups counted as rate 1");
    }
  }

  if (mask.aggregation && !empty && m.aggregation_field &&
      !st.aggregation_counts.empty()) {
    // Integer accumulation keeps exactly-representable targets exact.
    unsigned long long sum_sq = 0;
    for (const auto& [_, c] : st.aggregation_counts) {
      sum_sq += static_cast<unsigned long long>(c) * c;
    }
    const double n = static_cast<double>(st.record_count);
    v.set(MetricId::Aggregation, static_cast<double>(sum_sq) / (n * n));
  }

  if (mask.coverage && !empty && m.coverage_field && m.coverage_universe) {
    v.set(MetricId::Coverage,
          st.coverage_values.count() /
              static_cast<double>(m.coverage_universe->size()));
    if (!st.coverage_offenders.empty()) {
      std::string msg = "coverage values outside universe (excluded):";
      for (const auto& o : st.coverage_offenders) msg += " " + o;
      result.warnings.push_back(msg);
      note(MetricId::Coverage, "offending values excluded from numerator");
    }
  }

  if (mask.distortion && !empty) {
    if (m.distortion_field && st.distortion_count > 0) {
      v.set(MetricId::Distortion,
            st.distortion_sum / static_cast<double>(st.distortion_count));
    } else if (!m.distortion_field && m.truth_reference) {
      const uint64_t joined = st.truth_matched + st.truth_missed;
      if (joined > 0) {
        const double miss_rate =
            static_cast<double>(st.truth_missed) / static_cast<double>(joined);
        if (miss_rate > 0.05) {
          std::ostringstream os;
          os << "truth reference join missed " << (miss_rate * 100.0)
             << "% of records (limit 5%)";
          throw Error(Errc::JoinKeyMiss, os.str());
        }
        if (st.truth_missed > 0) {
          std::ostringstream os;
          os << "truth reference join missed " << st.truth_missed << " of "
             << joined << " records";
          result.warnings.push_back(os.str());
        }
        if (st.truth_matched > 0) {
          v.set(MetricId::Distortion,
                st.truth_deviation_sum / static_cast<double>(st.truth_matched));
          note(MetricId::Distortion, m.truth_reference->numeric
                                         ? "mean normalized deviation vs reference"
                                         : "fraction differing from reference");
        }
      }
    } else if (!m.distortion_field && !m.truth_reference) {
      note(MetricId::Distortion, "disabled: no distortion binding");
    }
  }

  if (mask.mismatch && !empty && m.label_field && m.mismatch_target) {
    uint64_t total = 0;
    for (const auto& [_, c] : st.label_counts) total += c;
    if (total > 0) {
      if (m.mismatch_target->binary) {
        uint64_t positives = 0;
        if (auto it = st.label_counts.find("1"); it != st.label_counts.end()) {
          positives = it->second;
        }
        const double rate =
            static_cast<double>(positives) / static_cast<double>(total);
        v.set(MetricId::Mismatch, std::abs(rate - m.mismatch_target->positive_rate));
      } else {
        double tvd = 0;
        const auto& q = m.mismatch_target->distribution;
        for (const auto& [label, prob] : q) {
          double p_hat = 0;
          if (auto it = st.label_counts.find(label); it != st.label_counts.end()) {
            p_hat = static_cast<double>(it->second) / static_cast<double>(total);
          }
          tvd += std::abs(p_hat - prob);
        }
        v.set(MetricId::Mismatch, tvd / 2.0);
      }
    }
  }

  // Disabled-metric annotations for the explain path.
  for (const auto& issue : validate_manifest(m)) {
    if (issue.severity == ManifestIssue::Severity::Warning && issue.disabled_metric) {
      const auto key = std::string(metric_name(*issue.disabled_metric));
      if (!v.present(*issue.disabled_metric) && !result.annotations.count(key)) {
        result.annotations[key] = issue.message;
      }
    }
  }

  return result;
}

MetricsEngine::FinalizeResult compute_all(const Dataset& dataset,
                                          MetricsOptions options) {
  MetricsEngine engine(options);
  const auto mask = AspectMask::all();
  return engine.finalize(engine.build_state(dataset, mask), dataset.manifest(), mask);
}

MetricsEngine::FinalizeResult compute_all_subset(const Dataset& dataset,
                                                 const std::vector<uint64_t>& indices,
                                                 MetricsOptions options) {
  MetricsEngine engine(options);
  const auto mask = AspectMask::all();
  return engine.finalize(engine.build_state(dataset, indices, mask),
                         dataset.manifest(), mask);
}

namespace {
std::optional<double> compute_one(const Dataset& dataset, MetricId id) {
  MetricsEngine engine;
  const auto mask = AspectMask::only(id);
  auto result = engine.finalize(engine.build_state(dataset, mask),
                                dataset.manifest(), mask);
  return result.metrics.maybe(id);
}
}  // namespace

uint64_t compute_volume(const Dataset& dataset) {
  return static_cast<uint64_t>(*compute_one(dataset, MetricId::Volume));
}
double compute_delay(const Dataset& dataset) {
  return *compute_one(dataset, MetricId::Delay);
}
std::optional<double> compute_scope(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Scope);
}
std::optional<double> compute_granularity(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Granularity);
}
std::optional<double> compute_variety(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Variety);
}
std::optional<double> compute_duration(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Duration);
}
std::optional<double> compute_sampling_rate(const Dataset& dataset) {
  return compute_one(dataset, MetricId::SamplingRate);
}
std::optional<double> compute_aggregation(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Aggregation);
}
std::optional<double> compute_coverage(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Coverage);
}
std::optional<double> compute_distortion(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Distortion);
}
std::optional<double> compute_mismatch(const Dataset& dataset) {
  return compute_one(dataset, MetricId::Mismatch);
}

}  // namespace gime
