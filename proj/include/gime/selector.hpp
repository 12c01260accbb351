#pragma once

// Threshold-gated subset selection with random and full baselines.
//
// The selection loop draws a fresh uniform candidate per iteration
// (substream(seed, i) for iteration i), evaluates it against the threshold
// spec, and either accepts, repairs in place with size-preserving swaps, or
// redraws. Redraw keeps candidates exchangeable with uniform sampling;
// repair bounds the number of iterations on pools where a uniform draw
// rarely satisfies strict gates.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gime/dataset.hpp"
#include "gime/metrics.hpp"
#include "gime/thresholds.hpp"

namespace gime {

struct Verdict {
  bool applicable = false;  // false for Ignore criteria
  bool pass = true;
  double distance = 0;  // how far the value sits outside the pass region
  std::optional<double> value;
  std::string detail;
};

struct Evaluation {
  std::array<Verdict, kMetricCount> verdicts{};
  bool overall_pass = true;

  const Verdict& verdict(MetricId id) const {
    return verdicts[static_cast<size_t>(id)];
  }
};

// Deterministic verdict per non-Ignore metric; overall pass iff all pass.
// A required metric absent from `metrics` fails with that reason.
Evaluation evaluate_thresholds(const MetricVector& metrics,
                               const ThresholdSpec& spec,
                               const MetricVector& pool);

struct Feasibility {
  bool feasible = true;
  std::vector<std::string> reasons;
};

// Fail-fast guard: detects criteria no subset can meet (required distinct
// counts above the pool's, volume bounds above the pool, criteria on
// metrics the pool does not expose, targets below required distinct counts).
Feasibility check_feasibility(const MetricVector& pool, const ThresholdSpec& spec,
                              std::optional<uint64_t> target_volume = std::nullopt);

enum class SelectionMode : uint8_t { Redraw, RedrawWithRepair };

struct SelectionOptions {
  // Absolute count or fraction of the pool (0, 1].
  std::variant<uint64_t, double> target_volume = uint64_t{0};
  uint64_t seed = 0;
  uint64_t max_iters = 100;
  SelectionMode mode = SelectionMode::RedrawWithRepair;
  bool estimate_pool = false;
  uint64_t estimate_sample_size = 10000;
  uint64_t max_repair_rounds = 12;
  MetricsOptions metrics;
};

enum class IterationAction : uint8_t { Accept, Redraw, Repair };

std::string_view iteration_action_name(IterationAction a);

struct IterationRecord {
  uint64_t draw_index = 0;  // substream index of the originating draw
  IterationAction action = IterationAction::Redraw;
  MetricVector candidate_metrics;
  Evaluation evaluation;
};

struct SelectionReport {
  std::string strategy;  // "gime" | "random" | "full"
  bool accepted = false;
  uint64_t seed = 0;
  uint64_t subset_size = 0;
  MetricVector pool_metrics;
  bool pool_estimated = false;
  MetricVector final_metrics;
  std::vector<IterationRecord> iterations;
  double wall_ms_total = 0;
  double wall_ms_pool_metrics = 0;
  std::string config_digest;
  std::string time_unit_name = "second";
  std::vector<std::string> warnings;

  std::string to_json() const;
};

struct SelectionOutcome {
  SampleHandle subset;
  SelectionReport report;
  bool accepted = false;  // false only on MaxItersExceeded (best-so-far kept)
};

// The selection gate. Throws Infeasible before any draw when the spec cannot
// be met; returns accepted=false with a best-so-far subset after max_iters.
SelectionOutcome gime_select(const Dataset& pool, const ThresholdSpec& spec,
                             const SelectionOptions& options);

// Baselines.
SelectionOutcome random_select(const Dataset& pool, uint64_t n, uint64_t seed,
                               const MetricsOptions& metrics = {});
SelectionOutcome full_select(const Dataset& pool, const MetricsOptions& metrics = {});

// Size-preserving repair of a failing candidate (exposed for testing).
// Returns the repaired indices; throws RepairStalled when no improving swap
// exists for any failing, repairable metric.
std::vector<uint64_t> repair_candidate(const Dataset& pool,
                                       const ThresholdSpec& spec,
                                       const MetricVector& pool_metrics,
                                       const std::vector<uint64_t>& candidate,
                                       const Evaluation& verdicts, Rng& rng);

}  // namespace gime
