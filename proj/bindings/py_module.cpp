#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "touchauth/classifiers.hpp"
#include "touchauth/data_model.hpp"
#include "touchauth/evaluation.hpp"
#include "touchauth/feature_engine.hpp"
#include "touchauth/version.hpp"

namespace py = pybind11;

namespace {

using Event = std::tuple<double, double, double, double, double>;  // t_ms,x,y,major,minor

touchauth::SwipeGesture swipe_from_events(const std::vector<Event>& events) {
  touchauth::SwipeGesture swipe;
  swipe.user_id = "py";
  swipe.swipe_id = "py";
  for (const auto& [t, x, y, major, minor] : events) {
    swipe.events.push_back({x, y, t, major, minor});
  }
  return swipe;
}

}  // namespace

PYBIND11_MODULE(_touchauth, m) {
  m.doc() = "touch-stroke continuous authentication core";
  m.attr("__version__") = touchauth::kToolkitVersion;

  m.def(
      "feature_names",
      [] {
        std::vector<std::string> names;
        for (auto name : touchauth::feature_names()) names.emplace_back(name);
        return names;
      },
      "Names of the per-swipe features, in vector order.");

  m.def(
      "extract_features",
      [](const std::vector<Event>& events) {
        const auto fv = touchauth::extract_features(swipe_from_events(events));
        return std::vector<double>(fv.values.begin(), fv.values.end());
      },
      py::arg("events"),
      "Per-swipe features from (t_ms, x, y, major_axis, minor_axis) samples.");

  m.def(
      "window_count",
      [](int n, int p, int q) {
        std::vector<touchauth::FeatureVector> vectors(static_cast<std::size_t>(n));
        return touchauth::build_windows(vectors, p, q).size();
      },
      py::arg("n"), py::arg("p"), py::arg("q"),
      "Number of sliding windows over n feature vectors.");

  m.def(
      "mutual_information",
      [](const std::vector<double>& column, const std::vector<int>& labels, int bins) {
        return touchauth::mutual_information(column, labels, bins);
      },
      py::arg("column"), py::arg("labels"), py::arg("bins") = 10,
      "Plug-in mutual information (nats) between a column and binary labels.");

  m.def(
      "select_threshold_eer",
      [](const std::vector<double>& genuine, const std::vector<double>& impostor) {
        const auto r = touchauth::select_threshold_eer(genuine, impostor);
        return py::dict(py::arg("tau") = r.tau, py::arg("eer") = r.eer, py::arg("far") = r.far,
                        py::arg("frr") = r.frr);
      },
      py::arg("genuine_scores"), py::arg("impostor_scores"),
      "Accept threshold that equalizes FAR and FRR on the given score lists.");

  m.def(
      "compute_rates",
      [](const std::vector<bool>& genuine, const std::vector<bool>& impostor) {
        const auto r = touchauth::compute_rates(genuine, impostor);
        return py::dict(py::arg("far") = r.far, py::arg("frr") = r.frr, py::arg("hter") = r.hter);
      },
      py::arg("genuine_decisions"), py::arg("impostor_decisions"),
      "FAR/FRR/HTER from accept decisions.");

  m.def("bypass_probability", &touchauth::bypass_probability, py::arg("p"), py::arg("q"),
        py::arg("n"),
        "Chance of defeating the entry check plus n continuous checks: p * q^n.");

  m.def(
      "synth_corpus_summary",
      [](int users, int swipes_per_user, double spread, std::uint64_t seed) {
        const auto corpus =
            touchauth::synth_generate_corpus(users, swipes_per_user, spread, seed);
        return py::dict(py::arg("dataset_id") = corpus.dataset_id,
                        py::arg("users") = corpus.user_ids().size(),
                        py::arg("swipes") = corpus.swipes.size());
      },
      py::arg("users") = 20, py::arg("swipes_per_user") = 120, py::arg("spread") = 1.0,
      py::arg("seed") = 42,
      "Generates a seeded synthetic corpus and reports its shape.");
}
