#include "gime/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "gime/digest.hpp"

namespace gime {

using nlohmann::ordered_json;

std::string_view iteration_action_name(IterationAction a) {
  switch (a) {
    case IterationAction::Accept: return "accept";
    case IterationAction::Redraw: return "redraw";
    case IterationAction::Repair: return "repair";
  }
  return "redraw";
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

Verdict judge(const Criterion& c, MeritDirection dir,
              const std::optional<double>& value,
              const std::optional<double>& pool_value) {
  Verdict v;
  if (c.kind == Criterion::Kind::Ignore) {
    v.applicable = false;
    return v;
  }
  v.applicable = true;
  v.value = value;
  if (!value) {
    v.pass = false;
    v.distance = std::numeric_limits<double>::infinity();
    v.detail = "required metric absent from candidate";
    return v;
  }
  const double x = *value;
  switch (c.kind) {
    case Criterion::Kind::EqualPoolOptimal: {
      if (!pool_value) {
        v.pass = false;
        v.distance = std::numeric_limits<double>::infinity();
        v.detail = "pool metric absent; pool-optimal gate unsatisfiable";
        return v;
      }
      if (dir == MeritDirection::HigherBetter) {
        const double bound = *pool_value - c.tolerance;
        v.pass = x >= bound;
        v.distance = std::max(0.0, bound - x);
        v.detail = "pool-optimal: need >= " + fmt_double(bound);
      } else {
        const double bound = *pool_value + c.tolerance;
        v.pass = x <= bound;
        v.distance = std::max(0.0, x - bound);
        v.detail = "pool-optimal: need <= " + fmt_double(bound);
      }
      return v;
    }
    case Criterion::Kind::Range:
      v.pass = x >= c.lo && x <= c.hi;
      v.distance = x < c.lo ? c.lo - x : (x > c.hi ? x - c.hi : 0.0);
      v.detail = "range [" + fmt_double(c.lo) + ", " + fmt_double(c.hi) + "]";
      return v;
    case Criterion::Kind::AtLeast:
      v.pass = x >= c.value;
      v.distance = std::max(0.0, c.value - x);
      v.detail = "need >= " + fmt_double(c.value);
      return v;
    case Criterion::Kind::AtMost:
      v.pass = x <= c.value;
      v.distance = std::max(0.0, x - c.value);
      v.detail = "need <= " + fmt_double(c.value);
      return v;
    case Criterion::Kind::Ignore:
      break;
  }
  return v;
}

}  // namespace

Evaluation evaluate_thresholds(const MetricVector& metrics,
                               const ThresholdSpec& spec,
                               const MetricVector& pool) {
  Evaluation out;
  for (MetricId id : all_metrics()) {
    Verdict v = judge(spec.criterion(id), spec.direction(id), metrics.maybe(id),
                      pool.maybe(id));
    if (v.applicable && !v.pass) out.overall_pass = false;
    out.verdicts[static_cast<size_t>(id)] = std::move(v);
  }
  return out;
}

namespace {

bool subset_monotone(MetricId id) {
  // Metrics a subset can never push above the pool value.
  switch (id) {
    case MetricId::Volume:
    case MetricId::Scope:
    case MetricId::Variety:
    case MetricId::Coverage:
    case MetricId::Duration:
      return true;
    default:
      return false;
  }
}

}  // namespace

Feasibility check_feasibility(const MetricVector& pool, const ThresholdSpec& spec,
                              std::optional<uint64_t> target_volume) {
  Feasibility out;
  auto reject = [&](MetricId id, const std::string& why) {
    out.feasible = false;
    out.reasons.push_back(std::string(metric_name(id)) + ": " + why);
  };

  for (MetricId id : all_metrics()) {
    const Criterion& c = spec.criterion(id);
    if (c.kind == Criterion::Kind::Ignore) continue;
    if (!pool.present(id)) {
      reject(id, "criterion set but the pool does not expose this metric");
      continue;
    }
    const double pool_value = pool.get(id);
    if (subset_monotone(id)) {
      if (c.kind == Criterion::Kind::AtLeast && c.value > pool_value) {
        reject(id, "requires >= " + fmt_double(c.value) + " but pool has " +
                       fmt_double(pool_value));
      }
      if (c.kind == Criterion::Kind::Range && c.lo > pool_value) {
        reject(id, "range low bound " + fmt_double(c.lo) + " above pool value " +
                       fmt_double(pool_value));
      }
    }
    // Distinct-count gates also need enough room in the target volume.
    if (target_volume && (id == MetricId::Scope || id == MetricId::Variety)) {
      double required = 0;
      if (c.kind == Criterion::Kind::AtLeast) required = c.value;
      if (c.kind == Criterion::Kind::EqualPoolOptimal) {
        required = pool_value - c.tolerance;
      }
      if (c.kind == Criterion::Kind::Range) required = c.lo;
      if (required > static_cast<double>(*target_volume)) {
        reject(id, "needs " + fmt_double(required) +
                       " distinct values but target volume is only " +
                       std::to_string(*target_volume));
      }
    }
  }

  if (target_volume) {
    const Criterion& c = spec.criterion(MetricId::Volume);
    if (c.kind != Criterion::Kind::Ignore) {
      const auto v = static_cast<double>(*target_volume);
      Verdict verdict = judge(c, spec.direction(MetricId::Volume), v,
                              pool.maybe(MetricId::Volume));
      if (!verdict.pass) {
        out.feasible = false;
        out.reasons.push_back("volume: target volume " +
                              std::to_string(*target_volume) +
                              " fails the volume criterion (" + verdict.detail + ")");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repair machinery

namespace {

struct PoolIndex {
  uint64_t n = 0;
  // Interned per-record keys; -1 where the binding is absent.
  std::vector<int32_t> variety_key, scope_key, coverage_key;
  std::vector<std::vector<uint64_t>> variety_records, scope_records, coverage_records;
  std::vector<int8_t> label;          // -1 unknown, else 0/1
  std::vector<double> delay_seconds;  // empty when not computable
  std::vector<double> distortion;     // empty when not bound as a field
  bool has_labels = false;
  double time_unit_seconds = 1.0;
};

int32_t intern(std::unordered_map<std::string, int32_t>& table,
               std::vector<std::vector<uint64_t>>& buckets, const std::string& key,
               uint64_t record) {
  auto [it, inserted] = table.emplace(key, static_cast<int32_t>(table.size()));
  if (inserted) buckets.emplace_back();
  buckets[static_cast<size_t>(it->second)].push_back(record);
  return it->second;
}

PoolIndex build_pool_index(const Dataset& pool) {
  const DatasetManifest& m = pool.manifest();
  PoolIndex idx;
  idx.n = pool.record_count();
  idx.time_unit_seconds = m.time_unit.seconds;

  auto fidx = [&](const std::optional<std::string>& f) -> std::optional<size_t> {
    return f ? m.field_index(*f) : std::nullopt;
  };
  const auto variety_f = m.feature_list ? std::nullopt : fidx(m.variety_field);
  const auto scope_f = m.scope_constant ? std::nullopt : fidx(m.scope_field);
  const auto coverage_f = fidx(m.coverage_field);
  const auto label_f = fidx(m.label_field);
  const auto event_f = fidx(m.event_time_field);
  const auto coll_f = fidx(m.collection_time_field);
  const auto dist_f = fidx(m.distortion_field);

  std::vector<size_t> needed;
  for (const auto& f : {variety_f, scope_f, coverage_f, label_f, event_f, coll_f, dist_f}) {
    if (f) needed.push_back(*f);
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

  if (variety_f) idx.variety_key.assign(idx.n, -1);
  if (scope_f) idx.scope_key.assign(idx.n, -1);
  if (coverage_f) idx.coverage_key.assign(idx.n, -1);
  const bool binary_labels =
      label_f && m.mismatch_target && m.mismatch_target->binary;
  if (binary_labels) {
    idx.label.assign(idx.n, -1);
    idx.has_labels = true;
  }
  if (event_f && coll_f) idx.delay_seconds.assign(idx.n, 0.0);
  if (dist_f) idx.distortion.assign(idx.n, 0.0);

  std::unordered_map<std::string, int32_t> variety_table, scope_table, coverage_table;

  pool.scan(needed, [&](uint64_t i, const Record& r, uint64_t row) {
    if (variety_f) {
      idx.variety_key[i] =
          intern(variety_table, idx.variety_records, field_value_key(r.at(*variety_f)), i);
    }
    if (scope_f) {
      idx.scope_key[i] =
          intern(scope_table, idx.scope_records, field_value_key(r.at(*scope_f)), i);
    }
    if (coverage_f) {
      idx.coverage_key[i] = intern(coverage_table, idx.coverage_records,
                                   field_value_key(r.at(*coverage_f)), i);
    }
    if (binary_labels) {
      const auto& v = r.at(*label_f);
      if (std::holds_alternative<bool>(v)) {
        idx.label[i] = std::get<bool>(v) ? 1 : 0;
      } else if (std::holds_alternative<int64_t>(v)) {
        idx.label[i] = std::get<int64_t>(v) != 0 ? 1 : 0;
      } else if (std::holds_alternative<std::string>(v)) {
        const auto& s = std::get<std::string>(v);
        if (s == "1" || s == "true" || s == "yes") idx.label[i] = 1;
        if (s == "0" || s == "false" || s == "no") idx.label[i] = 0;
      }
    }
    if (event_f && coll_f) {
      idx.delay_seconds[i] = field_value_number(r.at(*coll_f), row) -
                             field_value_number(r.at(*event_f), row);
    }
    if (dist_f) {
      idx.distortion[i] = field_value_number(r.at(*dist_f), row);
    }
  });
  return idx;
}

struct CandidateState {
  std::vector<uint64_t> indices;  // sorted
  std::vector<uint8_t> member;    // pool-sized bitmap

  explicit CandidateState(uint64_t pool_size, std::vector<uint64_t> idx)
      : indices(std::move(idx)), member(pool_size, 0) {
    for (uint64_t i : indices) member[i] = 1;
  }

  void apply_swaps(const std::vector<uint64_t>& out_records,
                   const std::vector<uint64_t>& in_records) {
    for (uint64_t i : out_records) member[i] = 0;
    for (uint64_t i : in_records) member[i] = 1;
    indices.clear();
    for (uint64_t i = 0; i < member.size(); ++i) {
      if (member[i]) indices.push_back(i);
    }
  }
};

// Counts per interned key within the candidate.
std::vector<uint32_t> key_counts(const std::vector<int32_t>& keys,
                                 size_t table_size,
                                 const std::vector<uint64_t>& candidate) {
  std::vector<uint32_t> counts(table_size, 0);
  for (uint64_t i : candidate) {
    const int32_t k = keys[i];
    if (k >= 0) counts[static_cast<size_t>(k)]++;
  }
  return counts;
}

struct RepairPlan {
  std::vector<uint64_t> out_records, in_records;
  bool empty() const { return out_records.empty(); }
};

// A record is a safe swap-out when removing it cannot lower any gated
// distinct metric: every gated key it carries appears at least twice in the
// candidate. Keys are decremented as records are claimed.
class SwapOutChooser {
 public:
  SwapOutChooser(const PoolIndex& idx, const ThresholdSpec& spec,
                 const CandidateState& cand)
      : idx_(idx) {
    auto gated = [&](MetricId id) {
      return spec.criterion(id).kind != Criterion::Kind::Ignore;
    };
    if (gated(MetricId::Variety) && !idx.variety_key.empty()) {
      variety_counts_ = key_counts(idx.variety_key, idx.variety_records.size(),
                                   cand.indices);
    }
    if (gated(MetricId::Scope) && !idx.scope_key.empty()) {
      scope_counts_ = key_counts(idx.scope_key, idx.scope_records.size(), cand.indices);
    }
    if (gated(MetricId::Coverage) && !idx.coverage_key.empty()) {
      coverage_counts_ =
          key_counts(idx.coverage_key, idx.coverage_records.size(), cand.indices);
    }
  }

  bool redundant(uint64_t record) const {
    auto ok = [&](const std::vector<uint32_t>& counts,
                  const std::vector<int32_t>& keys) {
      if (counts.empty()) return true;
      const int32_t k = keys[record];
      return k < 0 || counts[static_cast<size_t>(k)] >= 2;
    };
    return ok(variety_counts_, idx_.variety_key) &&
           ok(scope_counts_, idx_.scope_key) &&
           ok(coverage_counts_, idx_.coverage_key);
  }

  void claim(uint64_t record) {
    auto dec = [&](std::vector<uint32_t>& counts, const std::vector<int32_t>& keys) {
      if (counts.empty()) return;
      const int32_t k = keys[record];
      if (k >= 0) counts[static_cast<size_t>(k)]--;
    };
    dec(variety_counts_, idx_.variety_key);
    dec(scope_counts_, idx_.scope_key);
    dec(coverage_counts_, idx_.coverage_key);
  }

 private:
  const PoolIndex& idx_;
  std::vector<uint32_t> variety_counts_, scope_counts_, coverage_counts_;
};

// Swap in records carrying keys missing from the candidate. Lowest record
// index wins every tie.
RepairPlan plan_distinct_repair(const PoolIndex& idx, const ThresholdSpec& spec,
                                const std::vector<int32_t>& keys,
                                const std::vector<std::vector<uint64_t>>& key_records,
                                const CandidateState& cand, const Verdict& verdict) {
  RepairPlan plan;
  if (keys.empty()) return plan;

  auto counts = key_counts(keys, key_records.size(), cand.indices);
  uint64_t needed = static_cast<uint64_t>(std::ceil(verdict.distance - 1e-12));
  if (needed == 0) return plan;

  // Missing keys ordered by their first record in the pool.
  std::vector<std::pair<uint64_t, size_t>> missing;
  for (size_t k = 0; k < key_records.size(); ++k) {
    if (counts[k] == 0 && !key_records[k].empty()) {
      missing.emplace_back(key_records[k].front(), k);
    }
  }
  std::sort(missing.begin(), missing.end());

  SwapOutChooser chooser(idx, spec, cand);
  std::vector<uint8_t> claimed_in(cand.member.size(), 0);
  size_t out_cursor = 0;
  auto next_swap_out = [&]() -> std::optional<uint64_t> {
    while (out_cursor < cand.indices.size()) {
      const uint64_t rec = cand.indices[out_cursor];
      ++out_cursor;
      if (std::find(plan.out_records.begin(), plan.out_records.end(), rec) !=
          plan.out_records.end()) {
        continue;
      }
      if (chooser.redundant(rec)) return rec;
    }
    return std::nullopt;
  };

  for (const auto& [first_record, key] : missing) {
    if (plan.in_records.size() >= needed) break;
    std::optional<uint64_t> incoming;
    for (uint64_t rec : key_records[key]) {
      if (!cand.member[rec] && !claimed_in[rec]) {
        incoming = rec;
        break;
      }
    }
    if (!incoming) continue;
    auto outgoing = next_swap_out();
    if (!outgoing) break;
    chooser.claim(*outgoing);
    plan.in_records.push_back(*incoming);
    claimed_in[*incoming] = 1;
    plan.out_records.push_back(*outgoing);
  }
  return plan;
}

RepairPlan plan_label_repair(const PoolIndex& idx, const ThresholdSpec& spec,
                             const DatasetManifest& manifest,
                             const CandidateState& cand) {
  RepairPlan plan;
  if (!idx.has_labels || !manifest.mismatch_target ||
      !manifest.mismatch_target->binary) {
    return plan;
  }
  const double q = manifest.mismatch_target->positive_rate;
  const uint64_t n = cand.indices.size();
  if (n == 0) return plan;
  uint64_t positives = 0;
  for (uint64_t i : cand.indices) {
    if (idx.label[i] == 1) ++positives;
  }
  // Closest achievable positive count; ties break toward fewer positives.
  const double ideal = q * static_cast<double>(n);
  uint64_t target = static_cast<uint64_t>(std::floor(ideal));
  if (std::abs((ideal - std::floor(ideal)) - 0.5) < 1e-12) {
    // exact half: keep floor
  } else if (ideal - std::floor(ideal) > 0.5) {
    target += 1;
  }
  if (target == positives) return plan;

  const bool need_more_positives = target > positives;
  const uint64_t want =
      need_more_positives ? target - positives : positives - target;
  const int8_t out_label = need_more_positives ? 0 : 1;
  const int8_t in_label = need_more_positives ? 1 : 0;

  SwapOutChooser chooser(idx, spec, cand);
  std::vector<uint64_t> out_choices, fallback_out;
  for (uint64_t rec : cand.indices) {
    if (idx.label[rec] != out_label) continue;
    if (chooser.redundant(rec)) {
      if (out_choices.size() < want) {
        out_choices.push_back(rec);
        chooser.claim(rec);
      }
    } else {
      fallback_out.push_back(rec);
    }
  }
  for (uint64_t rec : fallback_out) {
    if (out_choices.size() >= want) break;
    out_choices.push_back(rec);
  }
  std::sort(out_choices.begin(), out_choices.end());

  std::vector<uint64_t> in_choices;
  for (uint64_t rec = 0; rec < idx.n && in_choices.size() < out_choices.size();
       ++rec) {
    if (!cand.member[rec] && idx.label[rec] == in_label) in_choices.push_back(rec);
  }
  const size_t swaps = std::min(out_choices.size(), in_choices.size());
  plan.out_records.assign(out_choices.begin(), out_choices.begin() + swaps);
  plan.in_records.assign(in_choices.begin(), in_choices.begin() + swaps);
  return plan;
}

RepairPlan plan_lowerbetter_repair(const PoolIndex& idx, const ThresholdSpec& spec,
                                   const MetricVector& pool_metrics, MetricId metric,
                                   const CandidateState& cand, const Verdict& verdict) {
  RepairPlan plan;
  const std::vector<double>* values = nullptr;
  double unit = 1.0;
  if (metric == MetricId::Delay) {
    if (idx.delay_seconds.empty()) return plan;
    values = &idx.delay_seconds;
    unit = idx.time_unit_seconds;
  } else if (metric == MetricId::Distortion) {
    if (idx.distortion.empty()) return plan;
    values = &idx.distortion;
  } else {
    return plan;
  }

  const Criterion& c = spec.criterion(metric);
  double bound = 0;
  if (c.kind == Criterion::Kind::AtMost) {
    bound = c.value;
  } else if (c.kind == Criterion::Kind::EqualPoolOptimal) {
    if (!pool_metrics.present(metric)) return plan;
    bound = pool_metrics.get(metric) + c.tolerance;
  } else if (c.kind == Criterion::Kind::Range) {
    bound = c.hi;
  } else {
    return plan;
  }
  const double bound_raw = bound * unit;
  (void)verdict;

  if (metric == MetricId::Delay) {
    // Max-type: every record above the bound must go.
    std::vector<uint64_t> offenders;
    for (uint64_t rec : cand.indices) {
      if ((*values)[rec] > bound_raw) offenders.push_back(rec);
    }
    std::vector<uint64_t> replacements;
    for (uint64_t rec = 0; rec < idx.n && replacements.size() < offenders.size();
         ++rec) {
      if (!cand.member[rec] && (*values)[rec] <= bound_raw) {
        replacements.push_back(rec);
      }
    }
    const size_t swaps = std::min(offenders.size(), replacements.size());
    plan.out_records.assign(offenders.begin(), offenders.begin() + swaps);
    plan.in_records.assign(replacements.begin(), replacements.begin() + swaps);
    return plan;
  }

  // Mean-type: swap worst offenders for the best available pool records
  // until the projected mean clears the bound (or improvements run out).
  const uint64_t n = cand.indices.size();
  double sum = 0;
  for (uint64_t rec : cand.indices) sum += (*values)[rec];

  std::vector<uint64_t> by_worst(cand.indices);
  std::sort(by_worst.begin(), by_worst.end(), [&](uint64_t a, uint64_t b) {
    if ((*values)[a] != (*values)[b]) return (*values)[a] > (*values)[b];
    return a < b;
  });
  std::vector<uint64_t> outside;
  for (uint64_t rec = 0; rec < idx.n; ++rec) {
    if (!cand.member[rec]) outside.push_back(rec);
  }
  std::sort(outside.begin(), outside.end(), [&](uint64_t a, uint64_t b) {
    if ((*values)[a] != (*values)[b]) return (*values)[a] < (*values)[b];
    return a < b;
  });

  size_t k = 0;
  double projected = sum;
  while (k < by_worst.size() && k < outside.size()) {
    const double gain = (*values)[by_worst[k]] - (*values)[outside[k]];
    if (gain <= 0) break;  // no further improvement possible
    projected += -gain;
    plan.out_records.push_back(by_worst[k]);
    plan.in_records.push_back(outside[k]);
    ++k;
    if (projected / static_cast<double>(n) <= bound_raw) break;
  }
  return plan;
}

struct RepairContext {
  const Dataset& pool;
  const ThresholdSpec& spec;
  const MetricVector& pool_metrics;
  PoolIndex index;

  RepairContext(const Dataset& p, const ThresholdSpec& s, const MetricVector& pm)
      : pool(p), spec(s), pool_metrics(pm), index(build_pool_index(p)) {}

  // One repair round: fix the highest-priority failing metric.
  std::vector<uint64_t> round(const std::vector<uint64_t>& candidate,
                              const Evaluation& verdicts) const {
    CandidateState cand(index.n, candidate);
    static constexpr MetricId kPriority[] = {
        MetricId::Variety, MetricId::Scope,      MetricId::Coverage,
        MetricId::Mismatch, MetricId::Delay,     MetricId::Distortion};
    for (MetricId id : kPriority) {
      const Verdict& v = verdicts.verdict(id);
      if (!v.applicable || v.pass) continue;
      RepairPlan plan;
      switch (id) {
        case MetricId::Variety:
          plan = plan_distinct_repair(index, spec, index.variety_key,
                                      index.variety_records, cand, v);
          break;
        case MetricId::Scope:
          plan = plan_distinct_repair(index, spec, index.scope_key,
                                      index.scope_records, cand, v);
          break;
        case MetricId::Coverage:
          plan = plan_distinct_repair(index, spec, index.coverage_key,
                                      index.coverage_records, cand, v);
          break;
        case MetricId::Mismatch:
          plan = plan_label_repair(index, spec, pool.manifest(), cand);
          break;
        case MetricId::Delay:
        case MetricId::Distortion:
          plan = plan_lowerbetter_repair(index, spec, pool_metrics, id, cand, v);
          break;
        default:
          break;
      }
      if (!plan.empty()) {
        cand.apply_swaps(plan.out_records, plan.in_records);
        return cand.indices;
      }
    }
    throw Error(Errc::RepairStalled,
                "no improving swap exists for any failing metric");
  }
};

ordered_json metric_vector_json_fragment(const MetricVector& v) {
  ordered_json metrics;
  for (MetricId id : all_metrics()) {
    const auto key = std::string(metric_name(id));
    if (v.present(id)) {
      metrics[key] = v.get(id);
    } else {
      metrics[key] = nullptr;
    }
  }
  return metrics;
}

ordered_json evaluation_json_fragment(const Evaluation& e) {
  ordered_json verdicts;
  for (MetricId id : all_metrics()) {
    const Verdict& v = e.verdict(id);
    if (!v.applicable) continue;
    ordered_json cell;
    cell["pass"] = v.pass;
    if (v.value) {
      cell["value"] = *v.value;
    } else {
      cell["value"] = nullptr;
    }
    if (!v.pass) cell["distance"] = v.distance;
    cell["detail"] = v.detail;
    verdicts[std::string(metric_name(id))] = std::move(cell);
  }
  return verdicts;
}

uint64_t resolve_target(const std::variant<uint64_t, double>& target,
                        uint64_t pool_size) {
  uint64_t n = 0;
  if (std::holds_alternative<uint64_t>(target)) {
    n = std::get<uint64_t>(target);
  } else {
    const double frac = std::get<double>(target);
    if (frac <= 0 || frac > 1) {
      throw Error(Errc::BadArgument, "target volume fraction must lie in (0, 1]");
    }
    n = static_cast<uint64_t>(std::llround(frac * static_cast<double>(pool_size)));
    if (n == 0) n = 1;
  }
  if (n == 0 || n > pool_size) {
    throw Error(Errc::BadArgument,
                "target volume must satisfy 0 < n <= pool volume (" +
                    std::to_string(pool_size) + "), got " + std::to_string(n));
  }
  return n;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

}  // namespace

std::vector<uint64_t> repair_candidate(const Dataset& pool,
                                       const ThresholdSpec& spec,
                                       const MetricVector& pool_metrics,
                                       const std::vector<uint64_t>& candidate,
                                       const Evaluation& verdicts, Rng& rng) {
  (void)rng;
  RepairContext ctx(pool, spec, pool_metrics);
  return ctx.round(candidate, verdicts);
}

std::string SelectionReport::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "selection_report";
  out["strategy"] = strategy;
  out["accepted"] = accepted;
  out["seed"] = seed;
  out["subset_size"] = subset_size;
  out["pool_estimated"] = pool_estimated;
  out["pool_metrics"] = metric_vector_json_fragment(pool_metrics);
  out["final_metrics"] = metric_vector_json_fragment(final_metrics);
  ordered_json iters = ordered_json::array();
  for (const auto& it : iterations) {
    ordered_json cell;
    cell["draw_index"] = it.draw_index;
    cell["action"] = std::string(iteration_action_name(it.action));
    cell["overall_pass"] = it.evaluation.overall_pass;
    cell["candidate_metrics"] = metric_vector_json_fragment(it.candidate_metrics);
    cell["verdicts"] = evaluation_json_fragment(it.evaluation);
    iters.push_back(std::move(cell));
  }
  out["iterations"] = std::move(iters);
  out["time_unit"] = time_unit_name;
  out["warnings"] = warnings;
  out["config_digest"] = config_digest;
  out["wall_time_ms"] = {{"total", wall_ms_total},
                         {"pool_metrics", wall_ms_pool_metrics}};
  return out.dump(2);
}

namespace {

std::string selection_config_digest(const Dataset& pool, const ThresholdSpec& spec,
                                    uint64_t n, const SelectionOptions& opts) {
  ordered_json j;
  j["manifest_digest"] = pool.manifest().digest();
  j["spec"] = ordered_json::parse(spec.to_json());
  j["target"] = n;
  j["seed"] = opts.seed;
  j["max_iters"] = opts.max_iters;
  j["mode"] = opts.mode == SelectionMode::Redraw ? "redraw" : "redraw_with_repair";
  j["estimate_pool"] = opts.estimate_pool;
  return hex_digest(j.dump());
}

MetricVector pool_metrics_for(const Dataset& pool, const SelectionOptions& opts,
                              bool& estimated, std::vector<std::string>& warnings) {
  estimated = false;
  if (!opts.estimate_pool ||
      pool.record_count() <= opts.estimate_sample_size) {
    return compute_all(pool, opts.metrics).metrics;
  }
  estimated = true;
  const auto sample =
      reservoir_estimate_sample(pool, opts.estimate_sample_size, opts.seed);
  auto result = compute_all_subset(pool, sample.indices, opts.metrics);
  // Volume is known exactly from the pass; the rest are sample estimates.
  result.metrics.set(MetricId::Volume, static_cast<double>(pool.record_count()));
  warnings.push_back("pool metrics estimated from a reservoir sample of " +
                     std::to_string(sample.indices.size()) + " records");
  return result.metrics;
}

}  // namespace

SelectionOutcome gime_select(const Dataset& pool, const ThresholdSpec& spec,
                             const SelectionOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t n = resolve_target(options.target_volume, pool.record_count());
  if (options.max_iters < 1) {
    throw Error(Errc::BadArgument, "max_iters must be >= 1");
  }

  SelectionOutcome outcome;
  SelectionReport& report = outcome.report;
  report.strategy = "gime";
  report.seed = options.seed;
  report.time_unit_name = pool.manifest().time_unit.name;
  report.config_digest = selection_config_digest(pool, spec, n, options);

  const auto t_pool = std::chrono::steady_clock::now();
  report.pool_metrics =
      pool_metrics_for(pool, options, report.pool_estimated, report.warnings);
  report.wall_ms_pool_metrics = ms_since(t_pool);

  const Feasibility feasibility =
      check_feasibility(report.pool_metrics, spec, n);
  if (!feasibility.feasible) {
    std::string message = "selection spec is infeasible:";
    for (const auto& r : feasibility.reasons) message += "\n  " + r;
    throw Error(Errc::Infeasible, message);
  }

  std::optional<RepairContext> repair_ctx;

  std::vector<uint64_t> best;
  MetricVector best_metrics;
  Evaluation best_eval;
  size_t best_failures = SIZE_MAX;

  auto consider_best = [&](const std::vector<uint64_t>& cand,
                           const MetricVector& metrics, const Evaluation& eval) {
    size_t failures = 0;
    for (MetricId id : all_metrics()) {
      const auto& v = eval.verdict(id);
      if (v.applicable && !v.pass) ++failures;
    }
    if (failures < best_failures) {
      best_failures = failures;
      best = cand;
      best_metrics = metrics;
      best_eval = eval;
    }
  };

  for (uint64_t iter = 0; iter < options.max_iters; ++iter) {
    Rng rng = Rng::substream(options.seed, iter);
    std::vector<uint64_t> candidate =
        sample_without_replacement(pool.record_count(), n, rng);
    MetricVector cand_metrics =
        compute_all_subset(pool, candidate, options.metrics).metrics;
    Evaluation eval = evaluate_thresholds(cand_metrics, spec, report.pool_metrics);
    consider_best(candidate, cand_metrics, eval);

    if (eval.overall_pass) {
      report.iterations.push_back(
          {iter, IterationAction::Accept, cand_metrics, eval});
      report.final_metrics = cand_metrics;
      report.subset_size = candidate.size();
      outcome.subset.indices = std::move(candidate);
      outcome.subset.seed = options.seed;
      outcome.accepted = true;
      report.accepted = true;
      report.wall_ms_total = ms_since(t0);
      return outcome;
    }

    if (options.mode == SelectionMode::RedrawWithRepair) {
      for (uint64_t round = 0; round < options.max_repair_rounds; ++round) {
        if (!repair_ctx) repair_ctx.emplace(pool, spec, report.pool_metrics);
        std::vector<uint64_t> repaired;
        try {
          repaired = repair_ctx->round(candidate, eval);
        } catch (const Error& e) {
          if (e.code() == Errc::RepairStalled) break;
          throw;
        }
        report.iterations.push_back(
            {iter, IterationAction::Repair, cand_metrics, eval});
        candidate = std::move(repaired);
        cand_metrics = compute_all_subset(pool, candidate, options.metrics).metrics;
        eval = evaluate_thresholds(cand_metrics, spec, report.pool_metrics);
        consider_best(candidate, cand_metrics, eval);
        if (eval.overall_pass) {
          report.iterations.push_back(
              {iter, IterationAction::Accept, cand_metrics, eval});
          report.final_metrics = cand_metrics;
          report.subset_size = candidate.size();
          outcome.subset.indices = std::move(candidate);
          outcome.subset.seed = options.seed;
          outcome.accepted = true;
          report.accepted = true;
          report.wall_ms_total = ms_since(t0);
          return outcome;
        }
      }
    }
    report.iterations.push_back({iter, IterationAction::Redraw, cand_metrics, eval});
  }

  // Max iterations exhausted: emit the best-so-far candidate, not accepted.
  report.accepted = false;
  report.final_metrics = best_metrics;
  report.subset_size = best.size();
  outcome.subset.indices = std::move(best);
  outcome.subset.seed = options.seed;
  outcome.accepted = false;
  report.warnings.push_back("max_iters exceeded; best candidate fails " +
                            std::to_string(best_failures) + " criterion(s)");
  report.wall_ms_total = ms_since(t0);
  return outcome;
}

SelectionOutcome random_select(const Dataset& pool, uint64_t n, uint64_t seed,
                               const MetricsOptions& metrics) {
  const auto t0 = std::chrono::steady_clock::now();
  SelectionOutcome outcome;
  outcome.subset = draw_uniform(pool, n, seed);
  SelectionReport& report = outcome.report;
  report.strategy = "random";
  report.seed = seed;
  report.time_unit_name = pool.manifest().time_unit.name;
  const auto t_pool = std::chrono::steady_clock::now();
  report.pool_metrics = compute_all(pool, metrics).metrics;
  report.wall_ms_pool_metrics = ms_since(t_pool);
  report.final_metrics =
      compute_all_subset(pool, outcome.subset.indices, metrics).metrics;
  report.subset_size = outcome.subset.indices.size();
  report.iterations.push_back(
      {0, IterationAction::Accept, report.final_metrics, Evaluation{}});
  report.accepted = true;
  outcome.accepted = true;
  {
    ordered_json j;
    j["manifest_digest"] = pool.manifest().digest();
    j["strategy"] = "random";
    j["n"] = n;
    j["seed"] = seed;
    report.config_digest = hex_digest(j.dump());
  }
  report.wall_ms_total = ms_since(t0);
  return outcome;
}

SelectionOutcome full_select(const Dataset& pool, const MetricsOptions& metrics) {
  const auto t0 = std::chrono::steady_clock::now();
  SelectionOutcome outcome;
  outcome.subset.indices.resize(pool.record_count());
  std::iota(outcome.subset.indices.begin(), outcome.subset.indices.end(), 0);
  SelectionReport& report = outcome.report;
  report.strategy = "full";
  report.time_unit_name = pool.manifest().time_unit.name;
  report.pool_metrics = compute_all(pool, metrics).metrics;
  report.final_metrics = report.pool_metrics;
  report.subset_size = outcome.subset.indices.size();
  report.iterations.push_back(
      {0, IterationAction::Accept, report.final_metrics, Evaluation{}});
  report.accepted = true;
  outcome.accepted = true;
  if (pool.record_count() == 0) {
    report.warnings.push_back("pool is empty; full selection is the empty subset");
  }
  {
    ordered_json j;
    j["manifest_digest"] = pool.manifest().digest();
    j["strategy"] = "full";
    report.config_digest = hex_digest(j.dump());
  }
  report.wall_ms_total = ms_since(t0);
  return outcome;
}

}  // namespace gime
