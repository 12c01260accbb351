// gime — general information metrics over record datasets: compute the 11
// metrics, fit sensitivity from sweeps, select threshold-gated training
// subsets, compare selection strategies, and verify the expectation model.
//
// Exit codes: 0 success, 1 usage/IO error, 2 infeasible spec,
// 3 iteration budget exceeded.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gime/dataset.hpp"
#include "gime/fixtures.hpp"
#include "gime/metrics.hpp"
#include "gime/selector.hpp"
#include "gime/sensitivity.hpp"
#include "gime/thresholds.hpp"
#include "gime/verifier.hpp"

namespace {

using gime::Error;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitMaxIters = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << std::endl;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(gime::Errc::IoError, "cannot write " + out_path);
  out << text << '\n';
}

// JSON config file values fill flags the user did not pass; flags win.
class ConfigFile {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(gime::Errc::IoError, "cannot open config: " + path);
    in >> values_;
  }

  template <typename T>
  void fill(const CLI::Option* option, const char* key, T& slot) const {
    if (option->count() > 0) return;
    if (!values_.is_object() || !values_.contains(key)) return;
    slot = values_[key].get<T>();
  }

 private:
  nlohmann::json values_;
};

std::variant<uint64_t, double> parse_target_volume(const std::string& text) {
  if (text.find('.') != std::string::npos) {
    return std::stod(text);  // fraction of the pool
  }
  return static_cast<uint64_t>(std::stoull(text));
}

gime::SurrogateModel parse_surrogate(const std::string& text) {
  // "affine:a,b" or "logistic:a,b"; bare "affine" / "logistic" use a=1, b=0.
  std::string kind = text;
  double a = 1.0, b = 0.0;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    kind = text.substr(0, colon);
    const auto args = text.substr(colon + 1);
    const auto comma = args.find(',');
    a = std::stod(args.substr(0, comma));
    if (comma != std::string::npos) b = std::stod(args.substr(comma + 1));
  }
  if (kind == "affine") return gime::SurrogateModel::affine(a, b);
  if (kind == "logistic") return gime::SurrogateModel::logistic(a, b);
  throw Error(gime::Errc::BadArgument, "unknown surrogate link: " + kind);
}

ordered_json metrics_fragment(const gime::MetricVector& v) {
  return ordered_json::parse(gime::metric_vector_to_json(v))["metrics"];
}

struct DataArgs {
  std::string data_path;
  std::string format = "csv";
  std::string manifest_path;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool sketch = false;

  void attach(CLI::App* cmd, ConfigFile& config, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    data_option = cmd->add_option("--data", data_path, "dataset file");
    format_option =
        cmd->add_option("--format", format, "csv or jsonl")->default_str("csv");
    manifest_option = cmd->add_option("--manifest", manifest_path, "manifest JSON");
    threads_option = cmd->add_option("--threads", threads, "worker cap");
    sketch_option = cmd->add_flag("--sketch", sketch,
                                  "distinct counts via sketches (<=1% error)");
    (void)config;
  }

  void merge(const ConfigFile& config) {
    config.fill(data_option, "data", data_path);
    config.fill(format_option, "format", format);
    config.fill(manifest_option, "manifest", manifest_path);
    config.fill(threads_option, "threads", threads);
    config.fill(sketch_option, "sketch", sketch);
    if (data_path.empty()) {
      throw Error(gime::Errc::BadArgument, "--data is required");
    }
    if (manifest_path.empty()) {
      throw Error(gime::Errc::BadArgument, "--manifest is required");
    }
  }

  gime::Dataset open() const {
    auto manifest = gime::DatasetManifest::load(manifest_path);
    return gime::load_dataset(data_path, gime::format_from_name(format),
                              std::move(manifest));
  }

  gime::MetricsOptions metrics_options() const {
    gime::MetricsOptions options;
    options.threads = threads;
    options.distinct_mode =
        sketch ? gime::DistinctMode::Sketch : gime::DistinctMode::Exact;
    return options;
  }

  CLI::Option* data_option = nullptr;
  CLI::Option* format_option = nullptr;
  CLI::Option* manifest_option = nullptr;
  CLI::Option* threads_option = nullptr;
  CLI::Option* sketch_option = nullptr;
};

int cmd_metrics(const DataArgs& data, uint64_t sample, uint64_t seed, bool explain,
                const std::string& out_path) {
  auto dataset = data.open();
  const auto options = data.metrics_options();

  gime::MetricsEngine::FinalizeResult result;
  bool estimated = false;
  uint64_t records_scanned = dataset.record_count();
  if (sample > 0 && sample < dataset.record_count()) {
    const auto handle = gime::reservoir_estimate_sample(dataset, sample, seed);
    result = gime::compute_all_subset(dataset, handle.indices, options);
    // The counting pass fixes volume exactly; the rest are estimates.
    result.metrics.set(gime::MetricId::Volume,
                       static_cast<double>(dataset.record_count()));
    records_scanned = handle.indices.size();
    estimated = true;
  } else {
    result = gime::compute_all(dataset, options);
  }

  auto out = ordered_json::parse(gime::metric_vector_to_json(
      result.metrics, dataset.manifest().time_unit.name, estimated));
  if (explain) {
    ordered_json explain_block;
    explain_block["records_scanned"] = records_scanned;
    explain_block["manifest_digest"] = dataset.manifest().digest();
    explain_block["annotations"] = result.annotations;
    explain_block["warnings"] = result.warnings;
    ordered_json bindings = ordered_json::parse(dataset.manifest().to_json());
    explain_block["bindings"] = bindings["bindings"];
    out["explain"] = std::move(explain_block);
  }
  for (const auto& w : dataset.warnings()) std::cerr << "warning: " << w << '\n';
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  emit(out.dump(2), out_path);
  return kExitOk;
}

int cmd_select(const DataArgs& data, const std::string& thresholds_path,
               const std::string& profile_path, const std::string& policy_path,
               const std::string& target_text, uint64_t seed, uint64_t max_iters,
               const std::string& mode, bool estimate_pool,
               const std::string& out_dir) {
  if (thresholds_path.empty() == profile_path.empty()) {
    throw Error(gime::Errc::BadArgument,
                "select needs exactly one of --thresholds or --profile");
  }
  auto dataset = data.open();

  gime::ThresholdSpec spec;
  if (!thresholds_path.empty()) {
    spec = gime::ThresholdSpec::load(thresholds_path);
  } else {
    const auto profile = gime::SensitivityProfile::load(profile_path);
    const auto policy = policy_path.empty()
                            ? gime::ThresholdPolicy{}
                            : gime::ThresholdPolicy::load(policy_path);
    const auto pool = gime::compute_all(dataset, data.metrics_options()).metrics;
    spec = gime::derive_thresholds(profile, pool, policy);
  }

  gime::SelectionOptions options;
  options.target_volume = parse_target_volume(target_text);
  options.seed = seed;
  options.max_iters = max_iters;
  options.metrics = data.metrics_options();
  options.estimate_pool = estimate_pool;
  if (mode == "redraw") {
    options.mode = gime::SelectionMode::Redraw;
  } else if (mode == "repair") {
    options.mode = gime::SelectionMode::RedrawWithRepair;
  } else {
    throw Error(gime::Errc::BadArgument, "--mode must be redraw or repair");
  }

  const auto outcome = gime::gime_select(dataset, spec, options);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream ids(std::filesystem::path(out_dir) / "subset_ids.txt",
                      std::ios::binary);
    gime::write_id_list(dataset, outcome.subset, ids);
  }
  {
    const char* ext = data.format == "jsonl" ? "subset.jsonl" : "subset.csv";
    std::ofstream copy(std::filesystem::path(out_dir) / ext, std::ios::binary);
    gime::write_subset_copy(dataset, outcome.subset, copy);
  }
  emit(outcome.report.to_json(),
       (std::filesystem::path(out_dir) / "report.json").string());
  for (const auto& w : outcome.report.warnings) std::cerr << "warning: " << w << '\n';
  if (!outcome.accepted) {
    std::cerr << "selection did not converge within " << max_iters
              << " iterations; best-so-far subset emitted\n";
    return kExitMaxIters;
  }
  std::cout << "accepted subset of " << outcome.report.subset_size << " records in "
            << outcome.report.iterations.size() << " evaluation(s); outputs in "
            << out_dir << '\n';
  return kExitOk;
}

int cmd_sensitivity(const std::string& sweeps_path, double rho_high, double rho_mod,
                    const std::string& out_path) {
  auto sweeps = gime::SweepSet::load(sweeps_path);
  gime::FitOptions options;
  options.rho_high = rho_high;
  options.rho_mod = rho_mod;
  const auto fit = gime::fit_sensitivity(sweeps, options);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
  emit(fit.profile.to_json(), out_path);
  return kExitOk;
}

int cmd_compare(const DataArgs& data, const std::string& thresholds_path,
                const std::string& target_text, const std::string& strategies_text,
                uint64_t repetitions, uint64_t seed, const std::string& surrogate_text,
                const std::string& surrogate_metric_name, uint64_t max_iters,
                const std::string& out_path) {
  if (repetitions < 1) {
    throw Error(gime::Errc::BadArgument, "--repetitions must be >= 1");
  }
  auto dataset = data.open();
  const auto spec = gime::ThresholdSpec::load(thresholds_path);
  const auto surrogate = parse_surrogate(surrogate_text);
  const auto surrogate_metric = gime::metric_from_name(surrogate_metric_name);
  const auto metrics_options = data.metrics_options();

  const auto target = parse_target_volume(target_text);
  uint64_t n = 0;
  if (std::holds_alternative<uint64_t>(target)) {
    n = std::get<uint64_t>(target);
  } else {
    n = static_cast<uint64_t>(std::llround(std::get<double>(target) *
                                           static_cast<double>(dataset.record_count())));
  }

  std::vector<std::string> strategies;
  {
    std::string token;
    for (char c : strategies_text + ",") {
      if (c == ',') {
        if (!token.empty()) strategies.push_back(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
  }

  auto perf_of = [&](const gime::MetricVector& v) {
    if (!v.present(surrogate_metric)) {
      throw Error(gime::Errc::BadArgument,
                  "surrogate metric " + std::string(gime::metric_name(surrogate_metric)) +
                      " absent from subset metrics");
    }
    return surrogate(v.get(surrogate_metric));
  };

  ordered_json report;
  report["schema_version"] = 1;
  report["kind"] = "comparison_report";
  report["repetitions"] = repetitions;
  report["seed"] = seed;
  report["target_volume"] = n;
  report["surrogate"] = {{"link", surrogate.link == gime::SurrogateModel::Link::Affine
                                      ? "affine"
                                      : "logistic"},
                         {"a", surrogate.a},
                         {"b", surrogate.b},
                         {"metric", std::string(gime::metric_name(surrogate_metric))}};

  ordered_json strategies_json;
  for (const auto& strategy : strategies) {
    std::vector<double> performances;
    double iterations_total = 0;
    std::optional<gime::MetricVector> first_metrics;
    const uint64_t reps = strategy == "full" ? 1 : repetitions;
    for (uint64_t rep = 0; rep < reps; ++rep) {
      const uint64_t rep_seed = gime::mix64(seed + gime::kGolden * rep);
      gime::SelectionOutcome outcome;
      if (strategy == "gime") {
        gime::SelectionOptions options;
        options.target_volume = n;
        options.seed = rep_seed;
        options.max_iters = max_iters;
        options.metrics = metrics_options;
        outcome = gime::gime_select(dataset, spec, options);
        if (!outcome.accepted) {
          throw Error(gime::Errc::MaxItersExceeded,
                      "gime strategy did not converge in repetition " +
                          std::to_string(rep));
        }
      } else if (strategy == "random") {
        outcome = gime::random_select(dataset, n, rep_seed, metrics_options);
      } else if (strategy == "full") {
        outcome = gime::full_select(dataset, metrics_options);
      } else {
        throw Error(gime::Errc::BadArgument, "unknown strategy: " + strategy);
      }
      performances.push_back(perf_of(outcome.report.final_metrics));
      iterations_total += static_cast<double>(outcome.report.iterations.size());
      if (!first_metrics) first_metrics = outcome.report.final_metrics;
    }
    double mean = 0;
    for (double p : performances) mean += p;
    mean /= static_cast<double>(performances.size());
    double variance = 0;
    for (double p : performances) variance += (p - mean) * (p - mean);
    variance = performances.size() > 1
                   ? variance / static_cast<double>(performances.size() - 1)
                   : 0.0;

    ordered_json cell;
    cell["repetitions"] = reps;
    cell["performance_mean"] = mean;
    cell["performance_std"] = std::sqrt(variance);
    cell["evaluations_mean"] = iterations_total / static_cast<double>(reps);
    cell["first_subset_metrics"] = metrics_fragment(*first_metrics);
    strategies_json[strategy] = std::move(cell);
  }
  report["strategies"] = std::move(strategies_json);
  emit(report.dump(2), out_path);
  return kExitOk;
}

int cmd_verify(uint64_t n, std::vector<double> ks, uint64_t trials, double tol,
               uint64_t seed, uint64_t eq1_configs, const std::string& law_text,
               bool enumerate, const std::string& out_path) {
  if (ks.empty()) ks.push_back(0.3);
  gime::SyntheticPoolSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.law = law_text == "spaced" ? gime::ValueLaw::EquallySpaced
                                  : gime::ValueLaw::Uniform;

  bool all_pass = true;
  ordered_json lemma_reports = ordered_json::array();
  for (double k : ks) {
    gime::LemmaOptions options;
    options.k = k;
    options.trials = trials;
    options.tolerance = tol;
    options.enumerate = enumerate;
    const auto report = gime::verify_lemma(spec, options);
    all_pass = all_pass && report.pass;
    lemma_reports.push_back(ordered_json::parse(gime::lemma_report_to_json(report)));
  }

  uint64_t eq1_passes = 0;
  ordered_json eq1_failures = ordered_json::array();
  gime::Rng rng = gime::Rng::substream(seed, 10007);
  for (uint64_t i = 0; i < eq1_configs; ++i) {
    const auto config = gime::eq1_random_config(rng);
    const auto result = gime::eq1_generate_and_check(config);
    if (result.pass) {
      ++eq1_passes;
    } else {
      eq1_failures.push_back({{"index", i},
                              {"scope", config.scope},
                              {"variety", config.variety},
                              {"duration_ticks", config.duration_ticks},
                              {"stride", config.stride},
                              {"granularity", config.granularity},
                              {"k_cells", config.k_cells},
                              {"note", result.note}});
    }
  }
  const bool eq1_pass = eq1_passes == eq1_configs;
  all_pass = all_pass && eq1_pass;

  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "verify_report";
  out["lemma"] = std::move(lemma_reports);
  out["volume_identity"] = {{"configs", eq1_configs},
                            {"passes", eq1_passes},
                            {"pass", eq1_pass},
                            {"failures", eq1_failures}};
  out["pass"] = all_pass;
  emit(out.dump(2), out_path);
  return all_pass ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"general information metrics toolkit"};
  app.require_subcommand(1);

  ConfigFile config;
  std::string config_path;

  // metrics
  auto* metrics_cmd =
      app.add_subcommand("metrics", "compute the 11 metrics of a dataset");
  DataArgs metrics_data;
  metrics_data.attach(metrics_cmd, config, config_path);
  uint64_t metrics_sample = 0;
  uint64_t metrics_seed = 0;
  bool metrics_explain = false;
  std::string metrics_out;
  auto* sample_option = metrics_cmd->add_option(
      "--sample", metrics_sample, "estimate from a reservoir sample of this size");
  auto* mseed_option = metrics_cmd->add_option("--seed", metrics_seed, "sample seed");
  metrics_cmd->add_flag("--explain", metrics_explain,
                        "include provenance: bindings, scan counts, annotations");
  auto* mout_option = metrics_cmd->add_option("--out", metrics_out, "output file");

  // select
  auto* select_cmd =
      app.add_subcommand("select", "threshold-gated training subset selection");
  DataArgs select_data;
  select_data.attach(select_cmd, config, config_path);
  std::string select_thresholds, select_profile, select_policy;
  std::string select_target = "0.5";
  uint64_t select_seed = 0, select_max_iters = 100;
  std::string select_mode = "repair";
  bool select_estimate_pool = false;
  std::string select_out_dir = "gime_out";
  auto* thr_option =
      select_cmd->add_option("--thresholds", select_thresholds, "threshold spec JSON");
  auto* prof_option =
      select_cmd->add_option("--profile", select_profile, "sensitivity profile JSON");
  auto* pol_option =
      select_cmd->add_option("--policy", select_policy, "threshold policy JSON");
  auto* target_option = select_cmd->add_option(
      "--target-volume", select_target, "subset size (count, or fraction with a dot)");
  auto* sseed_option = select_cmd->add_option("--seed", select_seed, "draw seed");
  auto* iters_option =
      select_cmd->add_option("--max-iters", select_max_iters, "iteration budget");
  auto* mode_option =
      select_cmd->add_option("--mode", select_mode, "redraw or repair");
  auto* est_option = select_cmd->add_flag("--estimate-pool", select_estimate_pool,
                                          "estimate pool metrics from a sample");
  auto* odir_option =
      select_cmd->add_option("--out-dir", select_out_dir, "output directory");

  // sensitivity
  auto* sens_cmd =
      app.add_subcommand("sensitivity", "fit sensitivity levels from sweeps");
  std::string sens_sweeps, sens_out;
  double rho_high = 0.8, rho_mod = 0.4;
  sens_cmd->add_option("--sweeps", sens_sweeps, "sweep CSV or JSON")->required();
  sens_cmd->add_option("--rho-high", rho_high, "high-sensitivity cutoff");
  sens_cmd->add_option("--rho-mod", rho_mod, "moderate-sensitivity cutoff");
  sens_cmd->add_option("--out", sens_out, "output file");

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "compare gime/random/full strategies");
  DataArgs compare_data;
  compare_data.attach(compare_cmd, config, config_path);
  std::string compare_thresholds, compare_target = "0.5";
  std::string compare_strategies = "gime,random,full";
  uint64_t compare_reps = 10, compare_seed = 0, compare_max_iters = 100;
  std::string compare_surrogate = "affine:1,0";
  std::string compare_metric = "volume";
  std::string compare_out;
  auto* cthr_option = compare_cmd->add_option("--thresholds", compare_thresholds,
                                              "threshold spec JSON");
  auto* ctarget_option =
      compare_cmd->add_option("--target-volume", compare_target, "subset size");
  auto* cstrat_option = compare_cmd->add_option("--strategies", compare_strategies,
                                                "comma list of gime,random,full");
  auto* creps_option =
      compare_cmd->add_option("--repetitions", compare_reps, "repetitions");
  auto* cseed_option = compare_cmd->add_option("--seed", compare_seed, "base seed");
  auto* csur_option = compare_cmd->add_option(
      "--surrogate", compare_surrogate, "affine:a,b or logistic:a,b");
  auto* cmetric_option = compare_cmd->add_option(
      "--surrogate-metric", compare_metric, "metric feeding the surrogate");
  auto* citers_option =
      compare_cmd->add_option("--max-iters", compare_max_iters, "gime budget");
  auto* cout_option = compare_cmd->add_option("--out", compare_out, "output file");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "verify expectation model and volume identity");
  uint64_t verify_n = 10000, verify_trials = 2000, verify_seed = 42;
  uint64_t verify_eq1 = 200;
  double verify_tol = 0.005;
  std::vector<double> verify_ks;
  std::string verify_law = "uniform";
  bool verify_enumerate = false;
  std::string verify_out;
  verify_cmd->add_option("--n", verify_n, "pool size");
  verify_cmd->add_option("--k", verify_ks, "draw fraction (repeatable)");
  verify_cmd->add_option("--trials", verify_trials, "Monte Carlo trials per class");
  verify_cmd->add_option("--tol", verify_tol, "tolerance, scaled by (M - m)");
  verify_cmd->add_option("--seed", verify_seed, "pool and trial seed");
  verify_cmd->add_option("--eq1-configs", verify_eq1,
                         "random volume-identity configurations");
  verify_cmd->add_option("--law", verify_law, "uniform or spaced");
  verify_cmd->add_flag("--enumerate", verify_enumerate,
                       "exhaustive subsets instead of Monte Carlo");
  verify_cmd->add_option("--out", verify_out, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    config.load(config_path);
    if (metrics_cmd->parsed()) {
      metrics_data.merge(config);
      config.fill(sample_option, "sample", metrics_sample);
      config.fill(mseed_option, "seed", metrics_seed);
      config.fill(mout_option, "out", metrics_out);
      return cmd_metrics(metrics_data, metrics_sample, metrics_seed, metrics_explain,
                         metrics_out);
    }
    if (select_cmd->parsed()) {
      select_data.merge(config);
      config.fill(thr_option, "thresholds", select_thresholds);
      config.fill(prof_option, "profile", select_profile);
      config.fill(pol_option, "policy", select_policy);
      config.fill(target_option, "target_volume", select_target);
      config.fill(sseed_option, "seed", select_seed);
      config.fill(iters_option, "max_iters", select_max_iters);
      config.fill(mode_option, "mode", select_mode);
      config.fill(est_option, "estimate_pool", select_estimate_pool);
      config.fill(odir_option, "out_dir", select_out_dir);
      return cmd_select(select_data, select_thresholds, select_profile, select_policy,
                        select_target, select_seed, select_max_iters, select_mode,
                        select_estimate_pool, select_out_dir);
    }
    if (sens_cmd->parsed()) {
      return cmd_sensitivity(sens_sweeps, rho_high, rho_mod, sens_out);
    }
    if (compare_cmd->parsed()) {
      compare_data.merge(config);
      config.fill(cthr_option, "thresholds", compare_thresholds);
      config.fill(ctarget_option, "target_volume", compare_target);
      config.fill(cstrat_option, "strategies", compare_strategies);
      config.fill(creps_option, "repetitions", compare_reps);
      config.fill(cseed_option, "seed", compare_seed);
      config.fill(csur_option, "surrogate", compare_surrogate);
      config.fill(cmetric_option, "surrogate_metric", compare_metric);
      config.fill(citers_option, "max_iters", compare_max_iters);
      config.fill(cout_option, "out", compare_out);
      if (compare_thresholds.empty()) {
        throw Error(gime::Errc::BadArgument, "--thresholds is required");
      }
      return cmd_compare(compare_data, compare_thresholds, compare_target,
                         compare_strategies, compare_reps, compare_seed,
                         compare_surrogate, compare_metric, compare_max_iters,
                         compare_out);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_n, verify_ks, verify_trials, verify_tol, verify_seed,
                        verify_eq1, verify_law, verify_enumerate, verify_out);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << gime::errc_name(e.code()) << "]: " << e.what() << '\n';
    if (e.code() == gime::Errc::Infeasible) return kExitInfeasible;
    if (e.code() == gime::Errc::MaxItersExceeded) return kExitMaxIters;
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
