#pragma once

// Monte Carlo and exhaustive verification of the subset-metric expectation
// model, plus surrogate sweep generation.
//
// For a pool of N scalar element values and a subset R of size r drawn
// uniformly without replacement, the expected subset metric has closed form
//
//   additive   (r/N) * M                    M = sum of all values
//   maximum    m + r (M - m) / (r + 1)      m, M = min / max element
//   minimum    M - r (M - m) / (r + 1)
//   mean       (M + m) / 2
//
// The maximum/minimum forms are exact for continuous-uniform value laws; on
// finite equally spaced pools the exhaustive mean differs by at most
// (M - m)/(N - 1), and verification widens its acceptance band by exactly
// that amount in equally spaced mode rather than hiding the gap.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gime/metric_types.hpp"
#include "gime/rng.hpp"
#include "gime/sensitivity.hpp"

namespace gime {

enum class ValueLaw : uint8_t { Uniform, EquallySpaced };

struct SyntheticPoolSpec {
  uint64_t n = 10000;
  double lo = 0.0;
  double hi = 1.0;
  ValueLaw law = ValueLaw::Uniform;
  uint64_t seed = 0;
};

struct ValuedPool {
  std::vector<double> values;

  static ValuedPool generate(const SyntheticPoolSpec& spec);

  double sum() const;
  double min_element() const;
  double max_element() const;

  // Extremes of the subset metric over non-empty subsets (the m and M that
  // appear in the closed forms).
  double metric_min(MetricTypeClass type_class) const;
  double metric_max(MetricTypeClass type_class) const;
};

// Subset metric under a type class: sum, max, min, or mean of the element
// values at `indices`. Throws EmptySubset.
double subset_metric(const ValuedPool& pool, const std::vector<uint64_t>& indices,
                     MetricTypeClass type_class);

// Closed-form expectation; k may be fractional (k*n is the subset size).
double lemma_expectation(MetricTypeClass type_class, double m, double M, uint64_t n,
                         double k);

struct MonteCarloEstimate {
  double mean = 0;
  double stderr_of_mean = 0;
  uint64_t trials = 0;
};

// Empirical mean of subset_metric over `trials` independent draws of size
// floor(k*n). Trial t uses substream(seed, t).
MonteCarloEstimate monte_carlo_expectation(const ValuedPool& pool,
                                           MetricTypeClass type_class, double k,
                                           uint64_t trials, uint64_t seed);

// Exact mean of subset_metric over all C(n, r) subsets. Guarded against
// blowup: throws BadArgument when C(n, r) exceeds max_subsets.
double enumeration_expectation(const ValuedPool& pool, MetricTypeClass type_class,
                               uint64_t r, uint64_t max_subsets = 2000000);

struct LemmaClassResult {
  MetricTypeClass type_class = MetricTypeClass::Additive;
  double closed_form = 0;
  double empirical = 0;
  double stderr_of_mean = 0;
  double tolerance_used = 0;  // the full acceptance bound applied
  double band = 0;            // equally-spaced O(1/N) widening, 0 otherwise
  bool pass = false;
  std::string mode;  // "monte_carlo" | "enumeration"
  std::string note;
};

struct LemmaReport {
  SyntheticPoolSpec pool_spec;
  double k = 0.3;
  uint64_t trials = 2000;
  double tolerance = 0.005;  // scaled by (M - m) per class
  std::vector<LemmaClassResult> classes;
  bool pass = false;
};

struct LemmaOptions {
  double k = 0.3;
  uint64_t trials = 2000;
  double tolerance = 0.005;
  bool enumerate = false;  // exhaustive instead of Monte Carlo
};

// Runs all four type classes over one generated pool. Pass per class iff
// |empirical - closed_form| <= max(tolerance*(M-m), 4*stderr) + band.
LemmaReport verify_lemma(const SyntheticPoolSpec& spec, const LemmaOptions& options);

std::string lemma_report_to_json(const LemmaReport& report);

// Indices (size `size`) maximizing the subset metric: largest values for
// additive/mean/minimum classes; for maximum type, the global max plus the
// lowest indices. Deterministic, lowest index first among ties.
std::vector<uint64_t> optimal_subset(const ValuedPool& pool,
                                     MetricTypeClass type_class, uint64_t size);

struct SurrogateModel {
  enum class Link : uint8_t { Affine, Logistic };
  Link link = Link::Affine;
  double a = 1.0;  // must be > 0: strictly increasing in the metric
  double b = 0.0;

  double operator()(double metric_value) const;
  static SurrogateModel affine(double a = 1.0, double b = 0.0);
  static SurrogateModel logistic(double a = 1.0, double b = 0.0);
};

struct TheoremTrialResult {
  double win_fraction = 0;  // fraction of repetitions with p(S) > p(R)
  double mean_gap = 0;      // mean of p(S) - p(R)
  bool tie_regime = false;  // degenerate pool: every subset ties
  uint64_t repetitions = 0;
};

// Fixes S = optimal_subset(floor(k*n)); each repetition draws a fresh
// uniform R of the same size and compares surrogate performances.
TheoremTrialResult theorem_trial(const ValuedPool& pool, MetricTypeClass type_class,
                                 double k, const SurrogateModel& surrogate,
                                 uint64_t repetitions, uint64_t seed);

struct Eq1Config {
  uint64_t scope = 1;
  uint64_t variety = 1;
  uint64_t duration_ticks = 1;   // total nominal ticks in the window
  uint64_t stride = 1;           // sampling_rate = 1/stride
  double granularity = 1.0;
  double k_cells = 1.0;          // k_cells/granularity records per cell
};

struct Eq1Result {
  bool pass = false;
  uint64_t volume = 0;           // measured by the metrics engine
  uint64_t expected_volume = 0;  // k*scope*variety*duration*rate/granularity
  std::string note;
};

// Generates the structured dataset for the config, measures it with the
// metrics engine, and checks the volume identity exactly (the engine's
// scope, variety, duration, and granularity are also required to equal the
// generator parameters). Throws NonIntegralVolume for configs whose record
// count is not an exact integer.
Eq1Result eq1_generate_and_check(const Eq1Config& config);

Eq1Config eq1_random_config(Rng& rng);

// Sweep generation for the sensitivity pipeline: subsets at the given sizes
// (optimal per size, hence deterministic), metric values from subset_metric
// under the metric's default type class, performances from `link`.
// Throws UnreachableLevel when a size exceeds the pool.
SweepSet generate_sweep(const ValuedPool& pool, MetricId metric,
                        const std::function<double(double)>& link,
                        const std::vector<uint64_t>& sizes);

}  // namespace gime
