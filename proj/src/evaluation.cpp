#include "touchauth/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "touchauth/errors.hpp"
#include "touchauth/feature_engine.hpp"
#include "touchauth/text_util.hpp"

namespace touchauth {

RateSet compute_rates(const std::vector<bool>& genuine_decisions,
                      const std::vector<bool>& impostor_decisions) {
  if (genuine_decisions.empty()) throw EmptyListError("no genuine decisions");
  if (impostor_decisions.empty()) throw EmptyListError("no impostor decisions");
  std::size_t impostor_accepts = 0;
  for (bool d : impostor_decisions) impostor_accepts += d ? 1 : 0;
  std::size_t genuine_rejects = 0;
  for (bool d : genuine_decisions) genuine_rejects += d ? 0 : 1;
  RateSet rates;
  rates.far = static_cast<double>(impostor_accepts) / static_cast<double>(impostor_decisions.size());
  rates.frr = static_cast<double>(genuine_rejects) / static_cast<double>(genuine_decisions.size());
  rates.hter = (rates.far + rates.frr) / 2.0;
  return rates;
}

double silverman_bandwidth(const std::vector<double>& samples) {
  const std::size_t k = samples.size();
  if (k < 2) throw TooFewSamplesError("bandwidth needs >= 2 samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  const double iqr = percentile(samples, 75.0) - percentile(samples, 25.0);
  const double scale = std::pow(static_cast<double>(k), -0.2);
  double h = 0.9 * std::min(sd, iqr / 1.34) * scale;
  if (h <= 0.0) h = 0.9 * sd * scale;
  if (h <= 0.0) h = 1e-3;
  return h;
}

double kde_eval_at(const std::vector<double>& samples, double bandwidth, double x) {
  const double inv = 1.0 / (bandwidth * std::sqrt(2.0 * std::acos(-1.0)));
  double sum = 0.0;
  for (double s : samples) {
    const double z = (x - s) / bandwidth;
    sum += std::exp(-0.5 * z * z);
  }
  return sum * inv / static_cast<double>(samples.size());
}

KdeCurve kde_density(const std::vector<double>& samples, int grid_size, double bandwidth) {
  if (samples.size() < 2) throw TooFewSamplesError("kde needs >= 2 samples");
  if (grid_size < 2) throw ConfigError("kde grid size must be >= 2");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 4.0 * h;
  const double hi = *mx + 4.0 * h;
  KdeCurve curve;
  curve.bandwidth = h;
  curve.grid.resize(static_cast<std::size_t>(grid_size));
  curve.density.resize(static_cast<std::size_t>(grid_size));
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (int i = 0; i < grid_size; ++i) {
    const double x = lo + step * static_cast<double>(i);
    curve.grid[static_cast<std::size_t>(i)] = x;
    curve.density[static_cast<std::size_t>(i)] = kde_eval_at(samples, h, x);
  }
  return curve;
}

double trapezoid_integral(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size()) throw DimensionMismatchError("trapezoid: grid/value mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    total += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
  }
  return total;
}

double density_overlap_unit_interval(const std::vector<double>& a, const std::vector<double>& b,
                                     int grid_size) {
  if (a.empty() || b.empty()) throw EmptyListError("overlap needs two non-empty sample sets");
  if (grid_size < 2) throw ConfigError("overlap grid size must be >= 2");
  const double ha = a.size() >= 2 ? silverman_bandwidth(a) : 1e-3;
  const double hb = b.size() >= 2 ? silverman_bandwidth(b) : 1e-3;
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  std::vector<double> fa(grid.size());
  std::vector<double> fb(grid.size());
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = step * static_cast<double>(i);
    fa[i] = kde_eval_at(a, ha, grid[i]);
    fb[i] = kde_eval_at(b, hb, grid[i]);
  }
  const double ma = trapezoid_integral(grid, fa);
  const double mb = trapezoid_integral(grid, fb);
  if (ma <= 0.0 || mb <= 0.0) return 0.0;
  std::vector<double> lower(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) lower[i] = std::min(fa[i] / ma, fb[i] / mb);
  return trapezoid_integral(grid, lower);
}

double bypass_probability(double p, double q, int n) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) throw ConfigError("probabilities must lie in [0,1]");
  if (n < 0) throw ConfigError("check count must be >= 0");
  return p * std::pow(q, static_cast<double>(n));
}

nlohmann::json report_to_json(const EvalReport& report) {
  return nlohmann::json{{"model_id", report.model_id},
                        {"classifier", report.classifier},
                        {"architecture", report.architecture},
                        {"scenario", report.scenario},
                        {"far", report.rates.far},
                        {"frr", report.rates.frr},
                        {"hter", report.rates.hter},
                        {"gender", to_string(report.gender)},
                        {"dataset_ids", report.dataset_ids},
                        {"seed", report.seed}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.model_id = j.at("model_id").get<std::string>();
  r.classifier = j.at("classifier").get<std::string>();
  r.architecture = j.at("architecture").get<std::string>();
  r.scenario = j.at("scenario").get<std::string>();
  r.rates.far = j.at("far").get<double>();
  r.rates.frr = j.at("frr").get<double>();
  r.rates.hter = j.at("hter").get<double>();
  r.gender = gender_from_string(j.at("gender").get<std::string>());
  r.dataset_ids = j.at("dataset_ids").get<std::vector<std::string>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

nlohmann::json reports_to_json(const std::vector<EvalReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return nlohmann::json{{"schema_version", 1}, {"reports", arr}};
}

std::vector<EvalReport> reports_from_json(const nlohmann::json& j) {
  std::vector<EvalReport> out;
  for (const auto& item : j.at("reports")) out.push_back(report_from_json(item));
  return out;
}

std::vector<HeatmapCell> heatmap_cells(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw EmptyListError("no reports for heatmap");
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, std::pair<double, std::size_t>> acc;
  for (const auto& r : reports) {
    const std::array<std::pair<const char*, double>, 3> metrics = {
        {{"far", r.rates.far}, {"frr", r.rates.frr}, {"hter", r.rates.hter}}};
    for (const auto& [metric, value] : metrics) {
      auto& slot = acc[{r.classifier, r.architecture, r.scenario, metric}];
      slot.first += value;
      slot.second += 1;
    }
  }
  std::vector<HeatmapCell> cells;
  cells.reserve(acc.size());
  for (const auto& [key, slot] : acc) {
    HeatmapCell c;
    std::tie(c.classifier, c.architecture, c.scenario, c.metric) = key;
    c.value = slot.first / static_cast<double>(slot.second);
    c.n_models = slot.second;
    cells.push_back(std::move(c));
  }
  return cells;
}

void write_heatmap_csv(const std::string& path, const std::vector<HeatmapCell>& cells) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "classifier,architecture,scenario,metric,value,n_models\n";
  for (const auto& c : cells) {
    out << c.classifier << ',' << c.architecture << ',' << c.scenario << ',' << c.metric << ','
        << format_double(c.value) << ',' << c.n_models << '\n';
  }
}

nlohmann::json heatmap_to_json(const std::vector<HeatmapCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    arr.push_back(nlohmann::json{{"classifier", c.classifier},
                                 {"architecture", c.architecture},
                                 {"scenario", c.scenario},
                                 {"metric", c.metric},
                                 {"value", c.value},
                                 {"n_models", c.n_models}});
  }
  return nlohmann::json{{"schema_version", 1}, {"cells", arr}};
}

namespace {

nlohmann::json kde_to_json(const KdeCurve& curve) {
  return nlohmann::json{
      {"grid", curve.grid}, {"density", curve.density}, {"bandwidth", curve.bandwidth}};
}

}  // namespace

FairnessReport fairness_by_group(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw EmptyListError("no reports for fairness analysis");
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::map<Gender, std::vector<double>>> cells;
  for (const auto& r : reports) {
    if (r.gender == Gender::unspecified) continue;
    cells[{r.architecture, r.scenario}][r.gender].push_back(r.rates.hter);
  }
  if (cells.empty()) throw GroupTooSmallError("no gender-labeled reports");

  FairnessReport report;
  double gap_sum = 0.0;
  for (const auto& [key, by_gender] : cells) {
    if (by_gender.size() < 2) throw GroupTooSmallError("fewer than two gender groups");
    FairnessCell cell;
    cell.architecture = key.first;
    cell.scenario = key.second;
    for (const auto& [gender, hters] : by_gender) {
      if (hters.size() < 2) throw GroupTooSmallError("gender group with fewer than two models");
      FairnessGroup group;
      group.gender = gender;
      group.hters = hters;
      double sum = 0.0;
      for (double v : hters) sum += v;
      group.mean_hter = sum / static_cast<double>(hters.size());
      group.kde = kde_density(hters, 256);
      cell.groups.push_back(std::move(group));
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < cell.groups.size(); ++i) {
      for (std::size_t j = i + 1; j < cell.groups.size(); ++j) {
        gap = std::max(gap, std::abs(cell.groups[i].mean_hter - cell.groups[j].mean_hter));
      }
    }
    cell.gap = gap;
    gap_sum += gap;
    report.cells.push_back(std::move(cell));
  }
  report.mean_gap = gap_sum / static_cast<double>(report.cells.size());
  return report;
}

nlohmann::json fairness_to_json(const FairnessReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : cell.groups) {
      groups.push_back(nlohmann::json{{"gender", to_string(g.gender)},
                                      {"hters", g.hters},
                                      {"mean_hter", g.mean_hter},
                                      {"kde", kde_to_json(g.kde)}});
    }
    cells.push_back(nlohmann::json{{"architecture", cell.architecture},
                                   {"scenario", cell.scenario},
                                   {"groups", groups},
                                   {"gap", cell.gap}});
  }
  return nlohmann::json{{"schema_version", 1}, {"cells", cells}, {"mean_gap", report.mean_gap}};
}

}  // namespace touchauth
