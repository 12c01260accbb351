#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gime/sensitivity.hpp"
#include "gime/verifier.hpp"

using namespace gime;

TEST_SUITE_BEGIN("verifier");

TEST_CASE("subset metrics by type class") {
  ValuedPool pool;
  pool.values = {1, 2, 3};
  const std::vector<uint64_t> all = {0, 1, 2};
  CHECK(subset_metric(pool, all, MetricTypeClass::Additive) == 6.0);
  CHECK(subset_metric(pool, all, MetricTypeClass::MaximumType) == 3.0);
  CHECK(subset_metric(pool, all, MetricTypeClass::MinimumType) == 1.0);
  CHECK(subset_metric(pool, all, MetricTypeClass::MeanType) == 2.0);
  CHECK_THROWS_AS((void)subset_metric(pool, {}, MetricTypeClass::Additive), Error);
}

TEST_CASE("closed-form expectations") {
  CHECK(lemma_expectation(MetricTypeClass::Additive, 1, 55, 10, 0.5) == 27.5);
  CHECK(lemma_expectation(MetricTypeClass::MeanType, 0, 1, 100, 0.3) == 0.5);
  CHECK(lemma_expectation(MetricTypeClass::MaximumType, 0, 1, 10000, 0.3) ==
        doctest::Approx(3000.0 / 3001.0).epsilon(1e-15));
  CHECK(lemma_expectation(MetricTypeClass::MinimumType, 0, 1, 10000, 0.3) ==
        doctest::Approx(1.0 / 3001.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)lemma_expectation(MetricTypeClass::Additive, 0, 1, 10, 0),
                  Error);
  CHECK_THROWS_AS(
      (void)lemma_expectation(MetricTypeClass::Additive, 0, 1, 10, 0.05), Error);
}

TEST_CASE("mean-type subset mean is the pool mean, distribution-free") {
  SyntheticPoolSpec spec;
  spec.n = 2000;
  spec.seed = 8;
  auto pool = ValuedPool::generate(spec);
  const double population_mean = pool.sum() / static_cast<double>(pool.values.size());
  auto est = monte_carlo_expectation(pool, MetricTypeClass::MeanType, 0.25, 400, 99);
  CHECK(std::abs(est.mean - population_mean) <= 4 * est.stderr_of_mean);
}

TEST_CASE("exhaustive enumeration over C(10,5): exact closed-form hits") {
  SyntheticPoolSpec spec;
  spec.n = 10;
  spec.lo = 1;
  spec.hi = 10;
  spec.law = ValueLaw::EquallySpaced;
  auto pool = ValuedPool::generate(spec);
  REQUIRE(pool.values[0] == 1.0);
  REQUIRE(pool.values[9] == 10.0);

  // Additive: exactly k*M = 0.5 * 55.
  CHECK(enumeration_expectation(pool, MetricTypeClass::Additive, 5) == 27.5);
  // Mean-type: exactly (M+m)/2 = 5.5.
  CHECK(enumeration_expectation(pool, MetricTypeClass::MeanType, 5) == 5.5);
  // Maximum-type: the discrete value r(N+1)/(r+1) = 55/6, not the continuous
  // closed form 8.5; the gap is the documented finite-pool band.
  const double enum_max =
      enumeration_expectation(pool, MetricTypeClass::MaximumType, 5);
  CHECK(enum_max == doctest::Approx(55.0 / 6.0).epsilon(1e-14));
  CHECK(enum_max == doctest::Approx(9.1667).epsilon(1e-4));
  const double cf_max = lemma_expectation(MetricTypeClass::MaximumType, 1, 10, 10, 0.5);
  CHECK(cf_max == 8.5);
  CHECK(std::abs(enum_max - cf_max) <= (10.0 - 1.0) / 9.0);
  // Minimum-type mirrors it.
  CHECK(enumeration_expectation(pool, MetricTypeClass::MinimumType, 5) ==
        doctest::Approx(11.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("mean-type enumeration equals the pool mean for any value law") {
  // Holds for every distribution, not only uniform ones; floating point
  // keeps it to within accumulation rounding on irrational-ish values.
  SyntheticPoolSpec spec;
  spec.n = 12;
  spec.seed = 99;
  auto pool = ValuedPool::generate(spec);
  pool.values[3] *= 17.3;  // deliberately non-uniform
  pool.values[8] += 5.0;
  const double pool_mean = pool.sum() / static_cast<double>(pool.values.size());
  for (uint64_t r : {1, 4, 7, 11}) {
    CHECK(enumeration_expectation(pool, MetricTypeClass::MeanType, r) ==
          doctest::Approx(pool_mean).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo converges to enumeration on small pools") {
  SyntheticPoolSpec spec;
  spec.n = 12;
  spec.seed = 5;
  auto pool = ValuedPool::generate(spec);
  for (auto type_class : {MetricTypeClass::Additive, MetricTypeClass::MaximumType,
                          MetricTypeClass::MinimumType, MetricTypeClass::MeanType}) {
    const double exact = enumeration_expectation(pool, type_class, 4);
    const auto est = monte_carlo_expectation(pool, type_class, 4.0 / 12.0, 4000, 17);
    CHECK(std::abs(est.mean - exact) <= 4 * est.stderr_of_mean);
  }
}

TEST_CASE("maximum-type Monte Carlo matches the order-statistic closed form") {
  SyntheticPoolSpec spec;
  spec.n = 10000;
  spec.seed = 42;
  auto pool = ValuedPool::generate(spec);
  const double m = pool.metric_min(MetricTypeClass::MaximumType);
  const double M = pool.metric_max(MetricTypeClass::MaximumType);
  const double cf = lemma_expectation(MetricTypeClass::MaximumType, m, M, 10000, 0.3);
  const auto est =
      monte_carlo_expectation(pool, MetricTypeClass::MaximumType, 0.3, 2000, 7);
  CHECK(std::abs(est.mean - cf) <=
        std::max(0.005 * (M - m), 4 * est.stderr_of_mean));
}

TEST_CASE("verify_lemma: defaults pass all four classes") {
  SyntheticPoolSpec spec;
  spec.n = 10000;
  spec.seed = 42;
  LemmaOptions options;  // k = 0.3, 2000 trials, tol 0.005
  auto report = verify_lemma(spec, options);
  REQUIRE(report.classes.size() == 4);
  for (const auto& c : report.classes) {
    INFO("class ", type_class_name(c.type_class), " cf ", c.closed_form, " emp ",
         c.empirical);
    CHECK(c.pass);
  }
  CHECK(report.pass);

  // High draw fraction also runs and passes.
  options.k = 0.9;
  CHECK(verify_lemma(spec, options).pass);
}

TEST_CASE("verify_lemma: zero tolerance fails and says why") {
  SyntheticPoolSpec spec;
  spec.n = 10000;
  spec.seed = 42;
  LemmaOptions options;
  options.tolerance = 0;
  auto report = verify_lemma(spec, options);
  CHECK(!report.pass);
  bool annotated = false;
  for (const auto& c : report.classes) {
    if (!c.pass && c.note == "tolerance below sampling noise") annotated = true;
  }
  CHECK(annotated);
}

TEST_CASE("verify_lemma holds up across 20 fixed seeds") {
  // The mean-type closed form (M+m)/2 assumes the uniform value law; a
  // realized pool's mean wobbles around its midrange by O(1/sqrt(N)), so a
  // small fraction of seeds land just outside the 0.005(M-m) band. The
  // max/min/additive forms have no such wobble and must pass every seed.
  int full_passes = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticPoolSpec spec;
    spec.n = 10000;
    spec.seed = seed;
    LemmaOptions options;
    options.trials = 400;
    const auto report = verify_lemma(spec, options);
    if (report.pass) ++full_passes;
    for (const auto& c : report.classes) {
      if (c.type_class != MetricTypeClass::MeanType) {
        INFO("seed ", seed, " class ", type_class_name(c.type_class));
        CHECK(c.pass);
      }
    }
  }
  CHECK(full_passes >= 15);
}

TEST_CASE("verify_lemma report JSON carries both numbers per class") {
  SyntheticPoolSpec spec;
  spec.n = 10;
  spec.lo = 1;
  spec.hi = 10;
  spec.law = ValueLaw::EquallySpaced;
  LemmaOptions options;
  options.k = 0.5;
  options.enumerate = true;
  auto report = verify_lemma(spec, options);
  CHECK(report.pass);
  const auto text = lemma_report_to_json(report);
  CHECK(text.find("\"closed_form\"") != std::string::npos);
  CHECK(text.find("\"empirical\"") != std::string::npos);
  CHECK(text.find("\"finite_pool_band\"") != std::string::npos);
  CHECK(text.find("\"enumeration\"") != std::string::npos);
}

TEST_CASE("optimal subsets: trivial shapes") {
  ValuedPool pool;
  pool.values = {1, 2, 3};
  auto additive = optimal_subset(pool, MetricTypeClass::Additive, 2);
  CHECK(additive == std::vector<uint64_t>{1, 2});
  CHECK(subset_metric(pool, additive, MetricTypeClass::Additive) == 5.0);

  auto maximum = optimal_subset(pool, MetricTypeClass::MaximumType, 2);
  CHECK(subset_metric(pool, maximum, MetricTypeClass::MaximumType) == 3.0);
  CHECK(std::find(maximum.begin(), maximum.end(), 2) != maximum.end());
}

TEST_CASE("optimal subsets: brute force confirms maximality on C(8,3)") {
  SyntheticPoolSpec spec;
  spec.n = 8;
  spec.seed = 23;
  auto pool = ValuedPool::generate(spec);

  for (auto type_class : {MetricTypeClass::Additive, MetricTypeClass::MaximumType,
                          MetricTypeClass::MinimumType, MetricTypeClass::MeanType}) {
    const auto chosen = optimal_subset(pool, type_class, 3);
    const double chosen_value = subset_metric(pool, chosen, type_class);
    double best = -1e300;
    for (uint64_t a = 0; a < 8; ++a) {
      for (uint64_t b = a + 1; b < 8; ++b) {
        for (uint64_t c = b + 1; c < 8; ++c) {
          best = std::max(best, subset_metric(pool, {a, b, c}, type_class));
        }
      }
    }
    CHECK(chosen_value == best);
  }
}

TEST_CASE("theorem trials: chosen subset beats random draws") {
  SyntheticPoolSpec spec;
  spec.n = 5000;
  spec.seed = 12;
  auto pool = ValuedPool::generate(spec);

  auto additive = theorem_trial(pool, MetricTypeClass::Additive, 0.3,
                                SurrogateModel::affine(), 100, 55);
  CHECK(additive.win_fraction >= 0.99);
  CHECK(additive.mean_gap > 0);
  CHECK(!additive.tie_regime);

  auto mean = theorem_trial(pool, MetricTypeClass::MeanType, 0.3,
                            SurrogateModel::affine(), 100, 55);
  CHECK(mean.win_fraction >= 0.99);
  CHECK(mean.mean_gap > 0);
}

TEST_CASE("theorem trials: degenerate pools report the tie regime") {
  ValuedPool flat;
  flat.values.assign(500, 1.0);
  auto result = theorem_trial(flat, MetricTypeClass::Additive, 0.3,
                              SurrogateModel::affine(), 100, 1);
  CHECK(result.tie_regime);
  CHECK(result.win_fraction == 0.0);
  CHECK(result.mean_gap == 0.0);
}

TEST_CASE("theorem win fraction is invariant under monotone link changes") {
  SyntheticPoolSpec spec;
  spec.n = 800;
  spec.seed = 3;
  auto pool = ValuedPool::generate(spec);
  auto affine = theorem_trial(pool, MetricTypeClass::MeanType, 0.25,
                              SurrogateModel::affine(2.0, 1.0), 200, 9);
  auto logistic = theorem_trial(pool, MetricTypeClass::MeanType, 0.25,
                                SurrogateModel::logistic(3.0, -1.0), 200, 9);
  CHECK(affine.win_fraction == logistic.win_fraction);
}

TEST_CASE("volume identity: direct products and halved sampling") {
  Eq1Config config;
  config.scope = 2;
  config.variety = 3;
  config.duration_ticks = 10;
  config.stride = 1;
  config.granularity = 1.0;
  config.k_cells = 1.0;
  auto result = eq1_generate_and_check(config);
  CHECK(result.pass);
  CHECK(result.volume == 60);

  config.stride = 2;  // sampling rate one half
  result = eq1_generate_and_check(config);
  CHECK(result.pass);
  CHECK(result.volume == 30);

  config.stride = 3;  // 10 % 3 != 0
  CHECK_THROWS_AS((void)eq1_generate_and_check(config), Error);

  config.stride = 1;
  config.granularity = 0.3;  // 1/0.3 records per cell is not integral
  try {
    (void)eq1_generate_and_check(config);
    FAIL("expected NonIntegralVolume");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonIntegralVolume);
  }
}

TEST_CASE("volume identity holds across 200 random configurations") {
  Rng rng(2718);
  int passes = 0;
  for (int i = 0; i < 200; ++i) {
    const auto config = eq1_random_config(rng);
    const auto result = eq1_generate_and_check(config);
    INFO("config ", i, ": scope ", config.scope, " variety ", config.variety,
         " ticks ", config.duration_ticks, " stride ", config.stride,
         " granularity ", config.granularity, " k ", config.k_cells);
    CHECK(result.pass);
    if (result.pass) ++passes;
  }
  CHECK(passes == 200);
}

TEST_CASE("generated sweeps feed the sensitivity classifier end to end") {
  SyntheticPoolSpec spec;
  spec.n = 1000;
  spec.seed = 77;
  auto pool = ValuedPool::generate(spec);

  auto increasing = generate_sweep(pool, MetricId::Volume,
                                   [](double v) { return 0.5 + v / 1e4; },
                                   {200, 400, 600, 800});
  auto fit = fit_sensitivity(increasing);
  CHECK(fit.profile.entry(MetricId::Volume).level == SensitivityLevel::High);

  auto constant = generate_sweep(pool, MetricId::Volume, [](double) { return 0.7; },
                                 {200, 400, 600, 800});
  auto flat_fit = fit_sensitivity(constant);
  CHECK(flat_fit.profile.entry(MetricId::Volume).level == SensitivityLevel::Low);

  try {
    (void)generate_sweep(pool, MetricId::Volume, [](double v) { return v; },
                         {200, 400, 600, 1200});
    FAIL("expected UnreachableLevel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnreachableLevel);
  }
}

TEST_SUITE_END();
