#pragma once

// Streaming computation of the 11 general information metrics.
//
// One pass over the records builds a PartialMetricState; finalize() turns it
// into a MetricVector. States built over disjoint record ranges of the same
// dataset merge associatively and commutatively: counts, distinct sets, max
// and min components merge exactly, mean components within 1e-9 relative.
//
// Operational definitions (units follow the manifest's time_unit):
//   volume        record count
//   delay         max(collection_time - event_time); 0 when unbound
//   scope         distinct scope_field values (or manifest constant)
//   granularity   mean granularity_field value, or the manifest constant
//   variety       distinct variety_field values, or |feature_list|
//   duration      span: max - min event_time; bucket_union: buckets x size
//   sampling_rate mean over groups of nominal_interval / mean observed
//                 interval, groups keyed by scope_field (one group if
//                 unbound); a group spanning less than one interval counts
//                 as fully sampled (warning)
//   aggregation   Herfindahl index sum((n_p/N)^2) over aggregation_field
//   coverage      |distinct coverage values in universe| / |universe|
//   distortion    mean per-record error value, or the fraction of joined
//                 records differing from a truth reference (mean normalized
//                 absolute deviation in numeric mode)
//   mismatch      binary: |positive rate - target|; categorical: total
//                 variation distance to the target distribution
//
// Degenerate input: an empty dataset yields volume 0, delay 0, duration 0,
// and every other metric absent.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gime/dataset.hpp"
#include "gime/hll.hpp"
#include "gime/manifest.hpp"
#include "gime/metric_types.hpp"

namespace gime {

enum class DistinctMode : uint8_t { Exact, Sketch };

struct MetricsOptions {
  DistinctMode distinct_mode = DistinctMode::Exact;
  unsigned sketch_precision = 14;
  unsigned threads = 1;  // partial states built concurrently when > 1
};

// Distinct counter that is either an exact hashed set or an HLL sketch.
class DistinctCounter {
 public:
  DistinctCounter() = default;
  explicit DistinctCounter(const MetricsOptions& opts);
  void add(const std::string& key);
  void merge(const DistinctCounter& other);
  double count() const;
  bool contains(const std::string& key) const;  // exact mode only
  const std::unordered_set<std::string>& values() const { return exact_; }
  bool sketched() const { return sketch_ != nullptr; }

 private:
  std::unordered_set<std::string> exact_;
  std::shared_ptr<HllSketch> sketch_;
};

struct GroupTimeStats {
  double min_time = 0;
  double max_time = 0;
  uint64_t count = 0;
};

struct PartialMetricState {
  std::string manifest_digest;
  uint64_t record_count = 0;

  std::optional<double> max_delay_seconds;
  DistinctCounter scope_values;
  DistinctCounter variety_values;
  std::optional<double> min_event_seconds;
  std::optional<double> max_event_seconds;
  std::unordered_set<int64_t> occupied_buckets;
  double granularity_sum = 0;
  uint64_t granularity_count = 0;
  std::unordered_map<std::string, uint64_t> aggregation_counts;
  DistinctCounter coverage_values;
  std::vector<std::string> coverage_offenders;
  double distortion_sum = 0;
  uint64_t distortion_count = 0;
  uint64_t truth_matched = 0;
  uint64_t truth_missed = 0;
  double truth_deviation_sum = 0;
  std::unordered_map<std::string, uint64_t> label_counts;
  std::unordered_map<std::string, GroupTimeStats> sampling_groups;

  std::vector<std::string> warnings;
};

// Which metrics a scan must service; compute_all uses all bits.
struct AspectMask {
  bool volume = false, delay = false, scope = false, granularity = false,
       variety = false, duration = false, sampling_rate = false,
       aggregation = false, coverage = false, distortion = false,
       mismatch = false;
  static AspectMask all();
  static AspectMask only(MetricId id);
};

class MetricsEngine {
 public:
  explicit MetricsEngine(MetricsOptions options = {}) : options_(options) {}

  PartialMetricState build_state(const Dataset& dataset,
                                 const AspectMask& mask) const;
  PartialMetricState build_state(const Dataset& dataset) const {
    return build_state(dataset, AspectMask::all());
  }

  // Build over a subset of record indices (sorted ascending).
  PartialMetricState build_state(const Dataset& dataset,
                                 const std::vector<uint64_t>& indices,
                                 const AspectMask& mask) const;

  // Build over the half-open index range [begin, end), for partitioned runs.
  PartialMetricState build_state_range(const Dataset& dataset, uint64_t begin,
                                       uint64_t end, const AspectMask& mask) const;

  struct FinalizeResult {
    MetricVector metrics;
    // Per-metric notes: disabled reasons, assumed-zero annotations, the
    // bindings used. Keyed by canonical metric name.
    std::map<std::string, std::string> annotations;
    std::vector<std::string> warnings;
  };

  FinalizeResult finalize(const PartialMetricState& state,
                          const DatasetManifest& manifest,
                          const AspectMask& mask) const;

  const MetricsOptions& options() const { return options_; }

 private:
  PartialMetricState build_state_impl(const Dataset& dataset,
                                      const std::vector<uint64_t>* indices,
                                      const AspectMask& mask) const;
  MetricsOptions options_;
};

// Associative, commutative combination of two states built under the same
// manifest over disjoint ranges. Throws ManifestMismatch otherwise.
PartialMetricState merge_partials(const PartialMetricState& a,
                                  const PartialMetricState& b);

// One streaming pass producing every computable metric. Equals the
// per-metric operations applied individually.
MetricsEngine::FinalizeResult compute_all(const Dataset& dataset,
                                          MetricsOptions options = {});
MetricsEngine::FinalizeResult compute_all_subset(
    const Dataset& dataset, const std::vector<uint64_t>& indices,
    MetricsOptions options = {});

// Individual metric operations. Absent bindings yield nullopt (except
// volume and delay, always defined).
uint64_t compute_volume(const Dataset& dataset);
double compute_delay(const Dataset& dataset);
std::optional<double> compute_scope(const Dataset& dataset);
std::optional<double> compute_granularity(const Dataset& dataset);
std::optional<double> compute_variety(const Dataset& dataset);
std::optional<double> compute_duration(const Dataset& dataset);
std::optional<double> compute_sampling_rate(const Dataset& dataset);
std::optional<double> compute_aggregation(const Dataset& dataset);
std::optional<double> compute_coverage(const Dataset& dataset);
std::optional<double> compute_distortion(const Dataset& dataset);
std::optional<double> compute_mismatch(const Dataset& dataset);

}  // namespace gime
