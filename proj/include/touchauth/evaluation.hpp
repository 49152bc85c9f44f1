#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/data_model.hpp"

namespace touchauth {

struct RateSet {
  double far = 0.0;
  double frr = 0.0;
  double hter = 0.0;
};

// Decisions are accept=true / reject=false. FAR = accepted impostors / total
// impostors, FRR = rejected genuines / total genuines, HTER = (FAR+FRR)/2.
RateSet compute_rates(const std::vector<bool>& genuine_decisions,
                      const std::vector<bool>& impostor_decisions);

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * k^(-1/5). Degenerate
// spreads (sd or IQR zero) fall back to a small positive width.
double silverman_bandwidth(const std::vector<double>& samples);

// Gaussian-kernel density on a uniform grid. The grid spans
// [min - 4h, max + 4h]; the wider apron keeps the trapezoidal integral of the
// curve within 1e-3 of one. bandwidth <= 0 selects the rule-of-thumb width.
// Pre: samples.size() >= 2 (TooFewSamplesError).
KdeCurve kde_density(const std::vector<double>& samples, int grid_size = 512,
                     double bandwidth = 0.0);

// Sum of the kernel mixture at one point (same math as kde_density cells).
double kde_eval_at(const std::vector<double>& samples, double bandwidth, double x);

double trapezoid_integral(const std::vector<double>& grid, const std::vector<double>& values);

// Integral of min(f_a, f_b) over a uniform grid_size-point grid on [0,1],
// after renormalizing each density to unit mass on that grid. Identical
// sample multisets give exactly 1.
double density_overlap_unit_interval(const std::vector<double>& a, const std::vector<double>& b,
                                     int grid_size = 256);

// Chance of defeating the entry-point check (p) plus n continuous checks
// that each pass with probability q: p * q^n.
double bypass_probability(double p, double q, int n);

struct EvalReport {
  std::string model_id;
  std::string classifier;
  std::string architecture;  // "V" or "G"
  std::string scenario;      // zero_same | zero_cross | population | random
  RateSet rates;
  Gender gender = Gender::unspecified;
  std::vector<std::string> dataset_ids;
  std::uint64_t seed = 0;
};

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
nlohmann::json reports_to_json(const std::vector<EvalReport>& reports);
std::vector<EvalReport> reports_from_json(const nlohmann::json& j);

struct HeatmapCell {
  std::string classifier;
  std::string architecture;
  std::string scenario;
  std::string metric;  // far | frr | hter
  double value = 0.0;
  std::size_t n_models = 0;
};

// One cell per (classifier, architecture, scenario, metric); value is the
// mean over all reports that land in the cell.
std::vector<HeatmapCell> heatmap_cells(const std::vector<EvalReport>& reports);
void write_heatmap_csv(const std::string& path, const std::vector<HeatmapCell>& cells);
nlohmann::json heatmap_to_json(const std::vector<HeatmapCell>& cells);

struct FairnessGroup {
  Gender gender = Gender::unspecified;
  std::vector<double> hters;
  double mean_hter = 0.0;
  KdeCurve kde;
};

struct FairnessCell {
  std::string architecture;
  std::string scenario;
  std::vector<FairnessGroup> groups;
  double gap = 0.0;  // largest pairwise |mean HTER difference|
};

struct FairnessReport {
  std::vector<FairnessCell> cells;
  double mean_gap = 0.0;
};

// Groups reports by gender inside each (architecture, scenario) cell.
// Reports with unspecified gender are ignored. Pre: every cell keeps >= 2
// groups with >= 2 reports each (GroupTooSmallError).
FairnessReport fairness_by_group(const std::vector<EvalReport>& reports);
nlohmann::json fairness_to_json(const FairnessReport& report);

}  // namespace touchauth
