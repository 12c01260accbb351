#pragma once

// Sensitivity classification from metric-vs-performance sweeps.
//
// A sweep group varies exactly one metric while holding the others fixed;
// Spearman rank correlation between the varied metric and performance
// decides High / Moderate / Low against the rho cutoffs. Rank correlation
// is invariant under strictly monotone transformations of either axis, so
// sweeps from real model training and surrogate sweeps classify alike.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gime/metric_types.hpp"
#include "gime/thresholds.hpp"

namespace gime {

struct SweepPoint {
  MetricVector metrics;
  double performance = 0;
  MetricId varied_metric = MetricId::Volume;
  std::string tag;
};

enum class PerformanceDirection : uint8_t { HigherBetter, LowerBetter };

struct SweepSet {
  std::vector<SweepPoint> points;
  PerformanceDirection performance_direction = PerformanceDirection::HigherBetter;

  // Group indices by varied metric, preserving point order.
  std::map<MetricId, std::vector<size_t>> groups() const;

  // Each group must vary only its varied metric: other present metrics stay
  // constant within 1e-9 relative. Violations throw ConfoundedSweep;
  // non-finite performance throws BadArgument.
  void validate() const;

  std::string to_csv() const;
  static SweepSet from_csv(const std::string& text);
  std::string to_json() const;
  static SweepSet from_json(const std::string& text);
  static SweepSet load(const std::string& path);  // by extension (.csv / .json)
};

// Spearman rank correlation with average ranks for ties; NaN-free inputs.
// A series with no rank variation correlates 0 by convention.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct FitOptions {
  double rho_high = 0.8;
  double rho_mod = 0.4;
  size_t min_points = 4;
};

struct FitResult {
  SensitivityProfile profile;
  std::vector<std::string> warnings;  // e.g. metrics without sweep groups
};

// Per metric: |rho| >= rho_high -> High, rho_mod <= |rho| < rho_high ->
// Moderate, else Low. Correlation is sign-adjusted so that "higher
// performance" always means better. Metrics without a sweep group default
// to Low with manual provenance and a warning. Throws DegenerateSweep when
// a group's varied metric never changes.
FitResult fit_sensitivity(const SweepSet& sweeps, const FitOptions& options = {});

}  // namespace gime
