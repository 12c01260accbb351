#include "gime/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "gime/dataset.hpp"
#include "gime/metrics.hpp"

namespace gime {

using nlohmann::ordered_json;

ValuedPool ValuedPool::generate(const SyntheticPoolSpec& spec) {
  if (spec.n < 2) throw Error(Errc::BadArgument, "synthetic pool needs n >= 2");
  if (!(spec.lo < spec.hi)) {
    throw Error(Errc::BadArgument, "synthetic pool needs lo < hi");
  }
  ValuedPool pool;
  pool.values.reserve(spec.n);
  if (spec.law == ValueLaw::Uniform) {
    Rng rng(spec.seed);
    for (uint64_t i = 0; i < spec.n; ++i) {
      pool.values.push_back(spec.lo + (spec.hi - spec.lo) * rng.next_double());
    }
  } else {
    const double step = (spec.hi - spec.lo) / static_cast<double>(spec.n - 1);
    for (uint64_t i = 0; i < spec.n; ++i) {
      pool.values.push_back(spec.lo + step * static_cast<double>(i));
    }
  }
  return pool;
}

double ValuedPool::sum() const {
  double s = 0;
  for (double v : values) s += v;
  return s;
}

double ValuedPool::min_element() const {
  return *std::min_element(values.begin(), values.end());
}

double ValuedPool::max_element() const {
  return *std::max_element(values.begin(), values.end());
}

double ValuedPool::metric_min(MetricTypeClass type_class) const {
  // Minimum over non-empty subsets: a single smallest element for every
  // class (positive-valued pools in the additive case).
  (void)type_class;
  return min_element();
}

double ValuedPool::metric_max(MetricTypeClass type_class) const {
  if (type_class == MetricTypeClass::Additive) return sum();
  return max_element();
}

double subset_metric(const ValuedPool& pool, const std::vector<uint64_t>& indices,
                     MetricTypeClass type_class) {
  if (indices.empty()) {
    throw Error(Errc::EmptySubset, "subset metric of an empty subset");
  }
  switch (type_class) {
    case MetricTypeClass::Additive: {
      double s = 0;
      for (uint64_t i : indices) s += pool.values[i];
      return s;
    }
    case MetricTypeClass::MaximumType: {
      double best = pool.values[indices[0]];
      for (uint64_t i : indices) best = std::max(best, pool.values[i]);
      return best;
    }
    case MetricTypeClass::MinimumType: {
      double best = pool.values[indices[0]];
      for (uint64_t i : indices) best = std::min(best, pool.values[i]);
      return best;
    }
    case MetricTypeClass::MeanType: {
      double s = 0;
      for (uint64_t i : indices) s += pool.values[i];
      return s / static_cast<double>(indices.size());
    }
  }
  return 0;
}

double lemma_expectation(MetricTypeClass type_class, double m, double M, uint64_t n,
                         double k) {
  if (!(k > 0 && k < 1)) throw Error(Errc::BadArgument, "need 0 < k < 1");
  if (m > M) throw Error(Errc::BadArgument, "need m <= M");
  const double kn = k * static_cast<double>(n);
  if (kn < 1) throw Error(Errc::BadArgument, "need k*n >= 1");
  switch (type_class) {
    case MetricTypeClass::Additive:
      return k * M;
    case MetricTypeClass::MaximumType:
      return m + kn * (M - m) / (kn + 1);
    case MetricTypeClass::MinimumType:
      return M - kn * (M - m) / (kn + 1);
    case MetricTypeClass::MeanType:
      return (M + m) / 2;
  }
  return 0;
}

MonteCarloEstimate monte_carlo_expectation(const ValuedPool& pool,
                                           MetricTypeClass type_class, double k,
                                           uint64_t trials, uint64_t seed) {
  if (trials < 100) throw Error(Errc::BadArgument, "need trials >= 100");
  const uint64_t n = pool.values.size();
  const uint64_t r = static_cast<uint64_t>(std::floor(k * static_cast<double>(n)));
  if (r < 1 || r >= n) {
    throw Error(Errc::BadArgument, "need 1 <= floor(k*n) < n");
  }
  std::vector<uint64_t> scratch(n);
  std::iota(scratch.begin(), scratch.end(), 0);
  double sum = 0, sum_sq = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, t);
    const auto draw = sample_without_replacement(scratch, r, rng);
    const double value = subset_metric(pool, draw, type_class);
    sum += value;
    sum_sq += value * value;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  const double variance =
      std::max(0.0, (sum_sq - sum * sum / static_cast<double>(trials)) /
                        static_cast<double>(trials - 1));
  est.stderr_of_mean = std::sqrt(variance / static_cast<double>(trials));
  return est;
}

double enumeration_expectation(const ValuedPool& pool, MetricTypeClass type_class,
                               uint64_t r, uint64_t max_subsets) {
  const uint64_t n = pool.values.size();
  if (r < 1 || r > n) throw Error(Errc::BadArgument, "need 1 <= r <= n");
  // C(n, r) with overflow guard against the enumeration limit.
  double combos = 1;
  for (uint64_t i = 0; i < r; ++i) {
    combos *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (combos > static_cast<double>(max_subsets) * 4) break;
  }
  if (combos > static_cast<double>(max_subsets)) {
    throw Error(Errc::BadArgument, "enumeration would visit too many subsets");
  }

  std::vector<uint64_t> combo(r);
  std::iota(combo.begin(), combo.end(), 0);
  // Mean-type accumulates subset sums and divides once at the end, keeping
  // integer-valued pools exact.
  long double accumulator = 0;
  uint64_t count = 0;
  for (;;) {
    double statistic;
    switch (type_class) {
      case MetricTypeClass::Additive:
      case MetricTypeClass::MeanType: {
        double s = 0;
        for (uint64_t i : combo) s += pool.values[i];
        statistic = s;
        break;
      }
      case MetricTypeClass::MaximumType:
        statistic = pool.values[*std::max_element(
            combo.begin(), combo.end(), [&](uint64_t a, uint64_t b) {
              return pool.values[a] < pool.values[b];
            })];
        break;
      case MetricTypeClass::MinimumType:
      default:
        statistic = pool.values[*std::min_element(
            combo.begin(), combo.end(), [&](uint64_t a, uint64_t b) {
              return pool.values[a] < pool.values[b];
            })];
        break;
    }
    accumulator += statistic;
    ++count;

    // Advance to the next combination in lexicographic order.
    int64_t pos = static_cast<int64_t>(r) - 1;
    while (pos >= 0 && combo[pos] == n - r + static_cast<uint64_t>(pos)) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (size_t j = static_cast<size_t>(pos) + 1; j < r; ++j) {
      combo[j] = combo[j - 1] + 1;
    }
  }
  long double mean = accumulator / static_cast<long double>(count);
  if (type_class == MetricTypeClass::MeanType) {
    mean /= static_cast<long double>(r);
  }
  return static_cast<double>(mean);
}

LemmaReport verify_lemma(const SyntheticPoolSpec& spec, const LemmaOptions& options) {
  LemmaReport report;
  report.pool_spec = spec;
  report.k = options.k;
  report.trials = options.trials;
  report.tolerance = options.tolerance;

  const ValuedPool pool = ValuedPool::generate(spec);
  const uint64_t n = pool.values.size();
  const uint64_t r =
      static_cast<uint64_t>(std::floor(options.k * static_cast<double>(n)));
  const double k_eff = static_cast<double>(r) / static_cast<double>(n);

  report.pass = true;
  for (MetricTypeClass type_class :
       {MetricTypeClass::Additive, MetricTypeClass::MaximumType,
        MetricTypeClass::MinimumType, MetricTypeClass::MeanType}) {
    LemmaClassResult result;
    result.type_class = type_class;
    const double m = pool.metric_min(type_class);
    const double M = pool.metric_max(type_class);
    result.closed_form = lemma_expectation(type_class, m, M, n, k_eff);

    if (options.enumerate) {
      result.mode = "enumeration";
      result.empirical = enumeration_expectation(pool, type_class, r);
      result.stderr_of_mean = 0;
    } else {
      result.mode = "monte_carlo";
      const auto est =
          monte_carlo_expectation(pool, type_class, options.k, options.trials,
                                  spec.seed + static_cast<uint64_t>(type_class));
      result.empirical = est.mean;
      result.stderr_of_mean = est.stderr_of_mean;
    }

    // Equally spaced pools carry a documented O(1/N) gap on max/min forms.
    if (spec.law == ValueLaw::EquallySpaced &&
        (type_class == MetricTypeClass::MaximumType ||
         type_class == MetricTypeClass::MinimumType)) {
      result.band = (M - m) / static_cast<double>(n - 1);
    }

    result.tolerance_used =
        std::max(options.tolerance * (M - m), 4 * result.stderr_of_mean) +
        result.band;
    const double gap = std::abs(result.empirical - result.closed_form);
    result.pass = gap <= result.tolerance_used;
    if (!result.pass && options.tolerance * (M - m) < result.stderr_of_mean) {
      result.note = "tolerance below sampling noise";
    }
    if (!result.pass) report.pass = false;
    report.classes.push_back(result);
  }
  return report;
}

std::string lemma_report_to_json(const LemmaReport& report) {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "lemma_report";
  out["n"] = report.pool_spec.n;
  out["law"] =
      report.pool_spec.law == ValueLaw::Uniform ? "uniform" : "equally_spaced";
  out["lo"] = report.pool_spec.lo;
  out["hi"] = report.pool_spec.hi;
  out["seed"] = report.pool_spec.seed;
  out["k"] = report.k;
  out["trials"] = report.trials;
  out["tolerance"] = report.tolerance;
  ordered_json classes;
  for (const auto& c : report.classes) {
    ordered_json cell;
    cell["closed_form"] = c.closed_form;
    cell["empirical"] = c.empirical;
    cell["stderr"] = c.stderr_of_mean;
    cell["tolerance_used"] = c.tolerance_used;
    if (c.band > 0) cell["finite_pool_band"] = c.band;
    cell["mode"] = c.mode;
    cell["pass"] = c.pass;
    if (!c.note.empty()) cell["note"] = c.note;
    classes[std::string(type_class_name(c.type_class))] = std::move(cell);
  }
  out["classes"] = std::move(classes);
  out["pass"] = report.pass;
  return out.dump(2);
}

std::vector<uint64_t> optimal_subset(const ValuedPool& pool,
                                     MetricTypeClass type_class, uint64_t size) {
  const uint64_t n = pool.values.size();
  if (size < 1 || size >= n) {
    throw Error(Errc::BadArgument, "need 1 <= size < pool size");
  }
  std::vector<uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  if (type_class == MetricTypeClass::MaximumType) {
    // Any subset containing the global max attains it; fill deterministically
    // with the lowest indices.
    uint64_t argmax = 0;
    for (uint64_t i = 1; i < n; ++i) {
      if (pool.values[i] > pool.values[argmax]) argmax = i;
    }
    std::vector<uint64_t> out;
    out.push_back(argmax);
    for (uint64_t i = 0; i < n && out.size() < size; ++i) {
      if (i != argmax) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Additive, mean, and minimum types are maximized by the largest values.
  std::sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) {
    if (pool.values[a] != pool.values[b]) return pool.values[a] > pool.values[b];
    return a < b;
  });
  std::vector<uint64_t> out(order.begin(), order.begin() + static_cast<long>(size));
  std::sort(out.begin(), out.end());
  return out;
}

double SurrogateModel::operator()(double metric_value) const {
  switch (link) {
    case Link::Affine:
      return a * metric_value + b;
    case Link::Logistic:
      return 1.0 / (1.0 + std::exp(-(a * metric_value + b)));
  }
  return metric_value;
}

SurrogateModel SurrogateModel::affine(double a, double b) {
  if (a <= 0) throw Error(Errc::BadArgument, "surrogate slope must be > 0");
  return {Link::Affine, a, b};
}

SurrogateModel SurrogateModel::logistic(double a, double b) {
  if (a <= 0) throw Error(Errc::BadArgument, "surrogate slope must be > 0");
  return {Link::Logistic, a, b};
}

TheoremTrialResult theorem_trial(const ValuedPool& pool, MetricTypeClass type_class,
                                 double k, const SurrogateModel& surrogate,
                                 uint64_t repetitions, uint64_t seed) {
  if (repetitions < 100) throw Error(Errc::BadArgument, "need repetitions >= 100");
  const uint64_t n = pool.values.size();
  const uint64_t r = static_cast<uint64_t>(std::floor(k * static_cast<double>(n)));
  if (r < 1 || r >= n) throw Error(Errc::BadArgument, "need 1 <= floor(k*n) < n");

  TheoremTrialResult result;
  result.repetitions = repetitions;
  result.tie_regime = pool.min_element() == pool.max_element();

  const auto chosen = optimal_subset(pool, type_class, r);
  const double p_chosen = surrogate(subset_metric(pool, chosen, type_class));

  std::vector<uint64_t> scratch(n);
  std::iota(scratch.begin(), scratch.end(), 0);
  uint64_t wins = 0;
  double gap_sum = 0;
  for (uint64_t rep = 0; rep < repetitions; ++rep) {
    Rng rng = Rng::substream(seed, rep);
    const auto random_draw = sample_without_replacement(scratch, r, rng);
    const double p_random = surrogate(subset_metric(pool, random_draw, type_class));
    if (p_chosen > p_random) ++wins;
    gap_sum += p_chosen - p_random;
  }
  result.win_fraction =
      static_cast<double>(wins) / static_cast<double>(repetitions);
  result.mean_gap = gap_sum / static_cast<double>(repetitions);
  return result;
}

Eq1Result eq1_generate_and_check(const Eq1Config& config) {
  if (config.scope < 1 || config.variety < 1 || config.duration_ticks < 1 ||
      config.stride < 1 || config.granularity <= 0 || config.k_cells <= 0) {
    throw Error(Errc::BadArgument, "eq1 config values must be positive");
  }
  if (config.duration_ticks % config.stride != 0) {
    throw Error(Errc::NonIntegralVolume,
                "duration_ticks must be divisible by the sampling stride");
  }
  const double per_cell_real = config.k_cells / config.granularity;
  const double rounded = std::round(per_cell_real);
  if (std::abs(per_cell_real - rounded) > 1e-9 || rounded < 1) {
    throw Error(Errc::NonIntegralVolume,
                "k_cells/granularity must be a positive integer record multiplicity");
  }
  const uint64_t per_cell = static_cast<uint64_t>(rounded);
  const uint64_t occupied = config.duration_ticks / config.stride;

  const double tick_seconds = 3600.0;

  DatasetManifest manifest;
  manifest.schema = {{"id", FieldKind::Text},
                     {"cell", FieldKind::Text},
                     {"type", FieldKind::Text},
                     {"tick", FieldKind::Timestamp}};
  manifest.record_id_field = "id";
  manifest.scope_field = "cell";
  manifest.variety_field = "type";
  manifest.event_time_field = "tick";
  manifest.granularity_constant = config.granularity;
  manifest.time_unit = {tick_seconds, "tick"};
  manifest.epoch_unit = {1.0, "second"};
  manifest.duration_mode = DurationMode::BucketUnion;
  manifest.bucket_size = {tick_seconds * static_cast<double>(config.stride),
                          "stride"};
  manifest.nominal_sampling_interval = TimeQuantity{tick_seconds, "tick"};

  std::vector<std::vector<std::string>> rows;
  rows.reserve(config.scope * config.variety * occupied * per_cell);
  uint64_t id = 0;
  for (uint64_t s = 0; s < config.scope; ++s) {
    for (uint64_t v = 0; v < config.variety; ++v) {
      for (uint64_t j = 0; j < occupied; ++j) {
        const uint64_t tick = j * config.stride;
        for (uint64_t dup = 0; dup < per_cell; ++dup) {
          rows.push_back({"r" + std::to_string(id++), "cell" + std::to_string(s),
                          "type" + std::to_string(v),
                          std::to_string(static_cast<uint64_t>(
                              static_cast<double>(tick) * tick_seconds))});
        }
      }
    }
  }

  const Dataset dataset = Dataset::in_memory(std::move(manifest), std::move(rows));
  const auto measured = compute_all(dataset).metrics;

  Eq1Result result;
  result.volume = static_cast<uint64_t>(measured.get(MetricId::Volume));

  const double rate = 1.0 / static_cast<double>(config.stride);
  const double expected_real = config.k_cells * static_cast<double>(config.scope) *
                               static_cast<double>(config.variety) *
                               static_cast<double>(config.duration_ticks) * rate /
                               config.granularity;
  result.expected_volume = static_cast<uint64_t>(std::llround(expected_real));

  const bool volume_ok =
      result.volume == result.expected_volume &&
      std::abs(expected_real - static_cast<double>(result.expected_volume)) < 1e-9;
  const bool cross_ok =
      measured.present(MetricId::Scope) &&
      measured.get(MetricId::Scope) == static_cast<double>(config.scope) &&
      measured.present(MetricId::Variety) &&
      measured.get(MetricId::Variety) == static_cast<double>(config.variety) &&
      measured.present(MetricId::Duration) &&
      measured.get(MetricId::Duration) ==
          static_cast<double>(config.duration_ticks) &&
      measured.present(MetricId::Granularity) &&
      measured.get(MetricId::Granularity) == config.granularity;
  result.pass = volume_ok && cross_ok;
  if (!volume_ok) {
    result.note = "volume " + std::to_string(result.volume) + " != expected " +
                  std::to_string(result.expected_volume);
  } else if (!cross_ok) {
    result.note = "engine metrics disagree with generator parameters";
  }
  return result;
}

Eq1Config eq1_random_config(Rng& rng) {
  Eq1Config config;
  config.scope = 1 + rng.bounded(5);
  config.variety = 1 + rng.bounded(5);
  static constexpr uint64_t kStrides[] = {1, 2, 4};
  config.stride = kStrides[rng.bounded(3)];
  config.duration_ticks = config.stride * (1 + rng.bounded(10));
  static constexpr double kGranularities[] = {0.25, 0.5, 1.0, 2.0};
  config.granularity = kGranularities[rng.bounded(4)];
  const uint64_t per_cell = 1 + rng.bounded(3);
  config.k_cells = static_cast<double>(per_cell) * config.granularity;
  return config;
}

SweepSet generate_sweep(const ValuedPool& pool, MetricId metric,
                        const std::function<double(double)>& link,
                        const std::vector<uint64_t>& sizes) {
  if (sizes.size() < 4) {
    throw Error(Errc::BadArgument, "need at least 4 sweep levels");
  }
  const MetricTypeClass type_class = classify_default(metric);
  SweepSet set;
  for (uint64_t size : sizes) {
    if (size < 1 || size >= pool.values.size()) {
      throw Error(Errc::UnreachableLevel,
                  "sweep level " + std::to_string(size) +
                      " is not constructible from a pool of " +
                      std::to_string(pool.values.size()));
    }
    const auto subset = optimal_subset(pool, type_class, size);
    SweepPoint point;
    point.varied_metric = metric;
    const double value = metric == MetricId::Volume
                             ? static_cast<double>(size)
                             : subset_metric(pool, subset, type_class);
    point.metrics.set(metric, value);
    point.performance = link(value);
    set.points.push_back(std::move(point));
  }
  return set;
}

}  // namespace gime
