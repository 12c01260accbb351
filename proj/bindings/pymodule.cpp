// Python bindings for the main operations: metric computation over files,
// threshold evaluation and selection, sensitivity fitting, and the
// expectation-model verifier. Structured results cross as parsed JSON
// (dicts), keeping the Python surface schema-identical to the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gime/dataset.hpp"
#include "gime/fixtures.hpp"
#include "gime/metrics.hpp"
#include "gime/selector.hpp"
#include "gime/sensitivity.hpp"
#include "gime/thresholds.hpp"
#include "gime/verifier.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  auto json_module = py::module_::import("json");
  return json_module.attr("loads")(j.dump());
}

py::dict metric_vector_dict(const gime::MetricVector& v) {
  py::dict out;
  for (gime::MetricId id : gime::all_metrics()) {
    const auto key = std::string(gime::metric_name(id));
    if (v.present(id)) {
      out[py::str(key)] = v.get(id);
    } else {
      out[py::str(key)] = py::none();
    }
  }
  return out;
}

gime::Dataset open_dataset(const std::string& data_path, const std::string& format,
                           const std::string& manifest_path) {
  auto manifest = gime::DatasetManifest::load(manifest_path);
  return gime::load_dataset(data_path, gime::format_from_name(format),
                            std::move(manifest));
}

gime::MetricTypeClass type_class_arg(const std::string& name) {
  return gime::type_class_from_name(name);
}

gime::ValuedPool pool_from_values(const std::vector<double>& values) {
  gime::ValuedPool pool;
  pool.values = values;
  return pool;
}

gime::SurrogateModel surrogate_arg(const std::string& link, double a, double b) {
  if (link == "affine") return gime::SurrogateModel::affine(a, b);
  if (link == "logistic") return gime::SurrogateModel::logistic(a, b);
  throw gime::Error(gime::Errc::BadArgument, "link must be affine or logistic");
}

}  // namespace

PYBIND11_MODULE(_gime, m) {
  m.doc() = "general information metrics: dataset profiling, threshold-gated "
            "subset selection, and expectation-model verification";

  py::register_exception<gime::Error>(m, "GimeError");

  m.def("classify_default",
        [](const std::string& metric) {
          return std::string(gime::type_class_name(
              gime::classify_default(gime::metric_from_name(metric))));
        },
        py::arg("metric"),
        "Default subset-formation class (additive/maximum/minimum/mean) of a metric");

  m.def("metric_names", [] {
    std::vector<std::string> names;
    for (gime::MetricId id : gime::all_metrics()) {
      names.emplace_back(gime::metric_name(id));
    }
    return names;
  });

  m.def("compute_metrics",
        [](const std::string& data, const std::string& manifest,
           const std::string& format, uint64_t sample, uint64_t seed,
           unsigned threads) {
          auto dataset = open_dataset(data, format, manifest);
          gime::MetricsOptions options;
          options.threads = threads;
          gime::MetricsEngine::FinalizeResult result;
          bool estimated = false;
          if (sample > 0 && sample < dataset.record_count()) {
            const auto handle = gime::reservoir_estimate_sample(dataset, sample, seed);
            result = gime::compute_all_subset(dataset, handle.indices, options);
            result.metrics.set(gime::MetricId::Volume,
                               static_cast<double>(dataset.record_count()));
            estimated = true;
          } else {
            result = gime::compute_all(dataset, options);
          }
          py::dict out;
          out["metrics"] = metric_vector_dict(result.metrics);
          out["estimated"] = estimated;
          out["annotations"] = json_to_py(nlohmann::json(result.annotations));
          out["warnings"] = result.warnings;
          return out;
        },
        py::arg("data"), py::arg("manifest"), py::arg("format") = "csv",
        py::arg("sample") = 0, py::arg("seed") = 0, py::arg("threads") = 1,
        "Compute the 11 metrics of a CSV/JSONL dataset under a manifest");

  m.def("validate_manifest",
        [](const std::string& manifest_path) {
          const auto manifest = gime::DatasetManifest::load(manifest_path);
          std::vector<py::dict> out;
          for (const auto& issue : gime::validate_manifest(manifest)) {
            py::dict cell;
            cell["severity"] =
                issue.severity == gime::ManifestIssue::Severity::Error ? "error"
                                                                       : "warning";
            cell["message"] = issue.message;
            if (issue.disabled_metric) {
              cell["disabled_metric"] =
                  std::string(gime::metric_name(*issue.disabled_metric));
            }
            out.push_back(std::move(cell));
          }
          return out;
        },
        py::arg("manifest"));

  m.def("draw_uniform",
        [](const std::string& data, const std::string& manifest,
           const std::string& format, uint64_t n, uint64_t seed) {
          auto dataset = open_dataset(data, format, manifest);
          return gime::draw_uniform(dataset, n, seed).indices;
        },
        py::arg("data"), py::arg("manifest"), py::arg("format"), py::arg("n"),
        py::arg("seed"), "Seeded uniform sample of record indices");

  m.def("evaluate_thresholds",
        [](const py::dict& metrics, const std::string& spec_json,
           const py::dict& pool) {
          auto to_vector = [](const py::dict& d) {
            gime::MetricVector v;
            for (auto item : d) {
              if (item.second.is_none()) continue;
              v.set(gime::metric_from_name(py::cast<std::string>(item.first)),
                    py::cast<double>(item.second));
            }
            return v;
          };
          const auto spec = gime::ThresholdSpec::from_json(spec_json);
          const auto eval =
              gime::evaluate_thresholds(to_vector(metrics), spec, to_vector(pool));
          py::dict out;
          out["overall_pass"] = eval.overall_pass;
          py::dict verdicts;
          for (gime::MetricId id : gime::all_metrics()) {
            const auto& v = eval.verdict(id);
            if (!v.applicable) continue;
            py::dict cell;
            cell["pass"] = v.pass;
            cell["detail"] = v.detail;
            verdicts[py::str(std::string(gime::metric_name(id)))] = std::move(cell);
          }
          out["verdicts"] = std::move(verdicts);
          return out;
        },
        py::arg("metrics"), py::arg("spec_json"), py::arg("pool"));

  m.def("select",
        [](const std::string& data, const std::string& manifest,
           const std::string& format, const std::string& thresholds_json,
           py::object target_volume, uint64_t seed, uint64_t max_iters,
           const std::string& mode, const std::string& out_dir) {
          auto dataset = open_dataset(data, format, manifest);
          const auto spec = gime::ThresholdSpec::from_json(thresholds_json);
          gime::SelectionOptions options;
          if (py::isinstance<py::float_>(target_volume)) {
            options.target_volume = py::cast<double>(target_volume);
          } else {
            options.target_volume = py::cast<uint64_t>(target_volume);
          }
          options.seed = seed;
          options.max_iters = max_iters;
          options.mode = mode == "redraw" ? gime::SelectionMode::Redraw
                                          : gime::SelectionMode::RedrawWithRepair;
          const auto outcome = gime::gime_select(dataset, spec, options);
          if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            std::ofstream ids(std::filesystem::path(out_dir) / "subset_ids.txt",
                              std::ios::binary);
            gime::write_id_list(dataset, outcome.subset, ids);
            std::ofstream report(std::filesystem::path(out_dir) / "report.json",
                                 std::ios::binary);
            report << outcome.report.to_json() << '\n';
          }
          py::dict out;
          out["accepted"] = outcome.accepted;
          out["indices"] = outcome.subset.indices;
          out["report"] = json_to_py(nlohmann::json::parse(outcome.report.to_json()));
          return out;
        },
        py::arg("data"), py::arg("manifest"), py::arg("format"),
        py::arg("thresholds_json"), py::arg("target_volume"), py::arg("seed") = 0,
        py::arg("max_iters") = 100, py::arg("mode") = "repair",
        py::arg("out_dir") = "",
        "Threshold-gated subset selection; returns indices and the full report");

  m.def("fit_sensitivity",
        [](const std::string& sweeps_path, double rho_high, double rho_mod) {
          gime::FitOptions options;
          options.rho_high = rho_high;
          options.rho_mod = rho_mod;
          const auto fit =
              gime::fit_sensitivity(gime::SweepSet::load(sweeps_path), options);
          py::dict out;
          out["profile"] =
              json_to_py(nlohmann::json::parse(fit.profile.to_json()));
          out["warnings"] = fit.warnings;
          return out;
        },
        py::arg("sweeps"), py::arg("rho_high") = 0.8, py::arg("rho_mod") = 0.4);

  m.def("derive_thresholds",
        [](const std::string& profile_json, const py::dict& pool,
           const std::string& policy_json) {
          gime::MetricVector pool_vector;
          for (auto item : pool) {
            if (item.second.is_none()) continue;
            pool_vector.set(gime::metric_from_name(py::cast<std::string>(item.first)),
                            py::cast<double>(item.second));
          }
          const auto profile = gime::SensitivityProfile::from_json(profile_json);
          const auto policy = policy_json.empty()
                                  ? gime::ThresholdPolicy{}
                                  : gime::ThresholdPolicy::from_json(policy_json);
          const auto spec = gime::derive_thresholds(profile, pool_vector, policy);
          return json_to_py(nlohmann::json::parse(spec.to_json()));
        },
        py::arg("profile_json"), py::arg("pool"), py::arg("policy_json") = "");

  m.def("lemma_expectation",
        [](const std::string& type_class, double m_value, double M_value, uint64_t n,
           double k) {
          return gime::lemma_expectation(type_class_arg(type_class), m_value, M_value,
                                         n, k);
        },
        py::arg("type_class"), py::arg("m"), py::arg("M"), py::arg("n"), py::arg("k"),
        "Closed-form expected subset metric for a uniform pool");

  m.def("subset_metric",
        [](const std::vector<double>& values, const std::vector<uint64_t>& indices,
           const std::string& type_class) {
          return gime::subset_metric(pool_from_values(values), indices,
                                     type_class_arg(type_class));
        },
        py::arg("values"), py::arg("indices"), py::arg("type_class"));

  m.def("optimal_subset",
        [](const std::vector<double>& values, const std::string& type_class,
           uint64_t size) {
          return gime::optimal_subset(pool_from_values(values),
                                      type_class_arg(type_class), size);
        },
        py::arg("values"), py::arg("type_class"), py::arg("size"));

  m.def("verify_lemma",
        [](uint64_t n, double k, uint64_t trials, double tolerance, uint64_t seed,
           const std::string& law, bool enumerate) {
          gime::SyntheticPoolSpec spec;
          spec.n = n;
          spec.seed = seed;
          spec.law = law == "spaced" ? gime::ValueLaw::EquallySpaced
                                     : gime::ValueLaw::Uniform;
          gime::LemmaOptions options;
          options.k = k;
          options.trials = trials;
          options.tolerance = tolerance;
          options.enumerate = enumerate;
          const auto report = gime::verify_lemma(spec, options);
          return json_to_py(
              nlohmann::json::parse(gime::lemma_report_to_json(report)));
        },
        py::arg("n") = 10000, py::arg("k") = 0.3, py::arg("trials") = 2000,
        py::arg("tolerance") = 0.005, py::arg("seed") = 42,
        py::arg("law") = "uniform", py::arg("enumerate") = false);

  m.def("theorem_trial",
        [](const std::vector<double>& values, const std::string& type_class, double k,
           uint64_t repetitions, uint64_t seed, const std::string& link, double a,
           double b) {
          const auto result = gime::theorem_trial(
              pool_from_values(values), type_class_arg(type_class), k,
              surrogate_arg(link, a, b), repetitions, seed);
          py::dict out;
          out["win_fraction"] = result.win_fraction;
          out["mean_gap"] = result.mean_gap;
          out["tie_regime"] = result.tie_regime;
          return out;
        },
        py::arg("values"), py::arg("type_class"), py::arg("k"),
        py::arg("repetitions") = 100, py::arg("seed") = 0, py::arg("link") = "affine",
        py::arg("a") = 1.0, py::arg("b") = 0.0);

  m.def("eq1_check",
        [](uint64_t scope, uint64_t variety, uint64_t duration_ticks, uint64_t stride,
           double granularity, double k_cells) {
          gime::Eq1Config config;
          config.scope = scope;
          config.variety = variety;
          config.duration_ticks = duration_ticks;
          config.stride = stride;
          config.granularity = granularity;
          config.k_cells = k_cells;
          const auto result = gime::eq1_generate_and_check(config);
          py::dict out;
          out["pass"] = result.pass;
          out["volume"] = result.volume;
          out["expected_volume"] = result.expected_volume;
          return out;
        },
        py::arg("scope"), py::arg("variety"), py::arg("duration_ticks"),
        py::arg("stride") = 1, py::arg("granularity") = 1.0, py::arg("k_cells") = 1.0,
        "Generate a structured dataset and check the volume identity exactly");

  m.def("write_civil_fixture",
        [](const std::string& dir, uint64_t records, uint64_t seed) {
          gime::CivilFixtureOptions options;
          options.records = records;
          options.seed = seed;
          gime::write_civil_fixture_files(dir, options);
        },
        py::arg("dir"), py::arg("records") = 10000, py::arg("seed") = 7);

  m.attr("__version__") = "0.1.0";
}
