#include "gime/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gime/csv.hpp"

namespace gime {

using nlohmann::json;
using nlohmann::ordered_json;

std::map<MetricId, std::vector<size_t>> SweepSet::groups() const {
  std::map<MetricId, std::vector<size_t>> out;
  for (size_t i = 0; i < points.size(); ++i) {
    out[points[i].varied_metric].push_back(i);
  }
  return out;
}

void SweepSet::validate() const {
  for (const auto& p : points) {
    if (!std::isfinite(p.performance)) {
      throw Error(Errc::BadArgument, "sweep performance must be finite");
    }
    if (!p.metrics.present(p.varied_metric)) {
      throw Error(Errc::ConfoundedSweep,
                  "sweep point lacks a value for its varied metric " +
                      std::string(metric_name(p.varied_metric)));
    }
  }
  for (const auto& [varied, idx] : groups()) {
    for (MetricId other : all_metrics()) {
      if (other == varied) continue;
      std::optional<double> reference;
      for (size_t i : idx) {
        const auto value = points[i].metrics.maybe(other);
        if (!value) continue;
        if (!reference) {
          reference = *value;
          continue;
        }
        const double scale = std::max({std::abs(*reference), std::abs(*value), 1.0});
        if (std::abs(*value - *reference) > 1e-9 * scale) {
          throw Error(Errc::ConfoundedSweep,
                      "group varying " + std::string(metric_name(varied)) +
                          " also varies " + std::string(metric_name(other)));
        }
      }
    }
  }
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::BadArgument, "spearman needs two equal-length series of >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const size_t n = rx.size();
  double mean_x = 0, mean_y = 0;
  for (size_t i = 0; i < n; ++i) {
    mean_x += rx[i];
    mean_y += ry[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean_x;
    const double dy = ry[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  // A constant series carries no association; callers reject constant
  // metric series before fitting (DegenerateSweep).
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

FitResult fit_sensitivity(const SweepSet& sweeps, const FitOptions& options) {
  if (options.rho_mod < 0 || options.rho_mod > options.rho_high ||
      options.rho_high > 1) {
    throw Error(Errc::BadArgument, "need 0 <= rho_mod <= rho_high <= 1");
  }
  sweeps.validate();

  FitResult result;
  const auto grouped = sweeps.groups();
  for (MetricId id : all_metrics()) {
    auto it = grouped.find(id);
    if (it == grouped.end()) {
      SensitivityEntry e;
      e.level = SensitivityLevel::Low;
      e.fitted = false;
      result.profile.set(id, e);
      result.warnings.push_back("no sweep group for " +
                                std::string(metric_name(id)) +
                                "; defaulted to low sensitivity");
      continue;
    }
    const auto& idx = it->second;
    if (idx.size() < options.min_points) {
      throw Error(Errc::BadArgument,
                  "sweep group for " + std::string(metric_name(id)) + " has " +
                      std::to_string(idx.size()) + " points; need >= " +
                      std::to_string(options.min_points));
    }
    std::vector<double> metric_values, performances;
    metric_values.reserve(idx.size());
    performances.reserve(idx.size());
    for (size_t i : idx) {
      metric_values.push_back(sweeps.points[i].metrics.get(id));
      performances.push_back(sweeps.points[i].performance);
    }
    {
      const auto [lo, hi] =
          std::minmax_element(metric_values.begin(), metric_values.end());
      if (*lo == *hi) {
        throw Error(Errc::DegenerateSweep,
                    "sweep group for " + std::string(metric_name(id)) +
                        " never varies its metric");
      }
    }
    double rho = spearman(metric_values, performances);
    if (sweeps.performance_direction == PerformanceDirection::LowerBetter) {
      rho = -rho;
    }
    SensitivityEntry e;
    e.fitted = true;
    e.correlation = rho;
    const double magnitude = std::abs(rho);
    if (magnitude >= options.rho_high) {
      e.level = SensitivityLevel::High;
    } else if (magnitude >= options.rho_mod) {
      e.level = SensitivityLevel::Moderate;
    } else {
      e.level = SensitivityLevel::Low;
    }
    result.profile.set(id, e);
  }
  return result;
}

std::string SweepSet::to_csv() const {
  std::ostringstream out;
  out << "varied_metric";
  for (MetricId id : all_metrics()) out << ',' << metric_name(id);
  out << ",performance,tag\n";
  for (const auto& p : points) {
    out << metric_name(p.varied_metric);
    for (MetricId id : all_metrics()) {
      out << ',';
      if (p.metrics.present(id)) {
        std::ostringstream cell;
        cell.precision(17);
        cell << p.metrics.get(id);
        out << cell.str();
      }
    }
    std::ostringstream perf;
    perf.precision(17);
    perf << p.performance;
    out << ',' << perf.str() << ',' << csv_escape(p.tag) << '\n';
  }
  return out.str();
}

SweepSet SweepSet::from_csv(const std::string& text) {
  std::istringstream in(text);
  CsvReader reader(in);
  CsvRecord header;
  if (!reader.next(header)) {
    throw Error(Errc::BadArgument, "sweep CSV is empty");
  }
  std::map<std::string, size_t> column;
  for (size_t c = 0; c < header.fields.size(); ++c) column[header.fields[c]] = c;
  if (!column.count("varied_metric") || !column.count("performance")) {
    throw Error(Errc::BadArgument,
                "sweep CSV needs varied_metric and performance columns");
  }
  SweepSet set;
  CsvRecord rec;
  while (reader.next(rec)) {
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    SweepPoint p;
    p.varied_metric = metric_from_name(rec.fields.at(column["varied_metric"]));
    for (MetricId id : all_metrics()) {
      auto it = column.find(std::string(metric_name(id)));
      if (it == column.end() || it->second >= rec.fields.size()) continue;
      const auto& cell = rec.fields[it->second];
      if (cell.empty()) continue;
      p.metrics.set(id, std::stod(cell));
    }
    p.performance = std::stod(rec.fields.at(column["performance"]));
    if (auto it = column.find("tag"); it != column.end() && it->second < rec.fields.size()) {
      p.tag = rec.fields[it->second];
    }
    set.points.push_back(std::move(p));
  }
  return set;
}

std::string SweepSet::to_json() const {
  ordered_json out;
  out["schema_version"] = 1;
  out["kind"] = "sweep_set";
  out["performance_direction"] =
      performance_direction == PerformanceDirection::HigherBetter ? "higher_better"
                                                                  : "lower_better";
  ordered_json pts = ordered_json::array();
  for (const auto& p : points) {
    ordered_json cell;
    cell["varied_metric"] = std::string(metric_name(p.varied_metric));
    ordered_json metrics;
    for (MetricId id : all_metrics()) {
      if (p.metrics.present(id)) {
        metrics[std::string(metric_name(id))] = p.metrics.get(id);
      }
    }
    cell["metrics"] = std::move(metrics);
    cell["performance"] = p.performance;
    if (!p.tag.empty()) cell["tag"] = p.tag;
    pts.push_back(std::move(cell));
  }
  out["points"] = std::move(pts);
  return out.dump(2);
}

SweepSet SweepSet::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::BadArgument,
                std::string("sweep JSON parse failure: ") + e.what());
  }
  SweepSet set;
  if (j.value("performance_direction", "higher_better") == std::string("lower_better")) {
    set.performance_direction = PerformanceDirection::LowerBetter;
  }
  for (const auto& cell : j.at("points")) {
    SweepPoint p;
    p.varied_metric = metric_from_name(cell.at("varied_metric").get<std::string>());
    if (cell.contains("metrics")) {
      for (MetricId id : all_metrics()) {
        const auto key = std::string(metric_name(id));
        if (cell["metrics"].contains(key) && !cell["metrics"][key].is_null()) {
          p.metrics.set(id, cell["metrics"][key].get<double>());
        }
      }
    }
    p.performance = cell.at("performance").get<double>();
    p.tag = cell.value("tag", "");
    set.points.push_back(std::move(p));
  }
  return set;
}

SweepSet SweepSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open sweep file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return from_json(buf.str());
  }
  return from_csv(buf.str());
}

}  // namespace gime
