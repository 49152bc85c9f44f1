#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "touchauth/dense_net.hpp"

namespace touchauth {

// Binary scorer: 1 = genuine, 0 = impostor; score is genuine-likeness in [0,1].
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void train(const std::vector<std::vector<double>>& X, const std::vector<int>& y) = 0;
  virtual double score(const std::vector<double>& x) const = 0;
  virtual std::string name() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

struct MlpConfig {
  std::vector<int> hidden = {64, 32};
  int epochs = 200;
  int batch = 64;
  double lr = 1e-3;
  double leak = 0.2;
  std::uint64_t seed = 0;
};

// Dense net with sigmoid output trained by mini-batch gradient descent on
// clamped cross-entropy.
class MlpClassifier : public Classifier {
 public:
  explicit MlpClassifier(MlpConfig cfg) : cfg_(std::move(cfg)) {}

  void train(const std::vector<std::vector<double>>& X, const std::vector<int>& y) override;
  double score(const std::vector<double>& x) const override;
  std::string name() const override { return "mlp"; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<MlpClassifier> from_json(const nlohmann::json& j);

  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

 private:
  MlpConfig cfg_;
  DenseNet net_;
  std::vector<double> epoch_losses_;
  bool trained_ = false;
};

struct RfConfig {
  int trees = 100;
  int max_depth = 12;  // 0 = unlimited
  int min_leaf = 2;
  int mtry = 0;  // 0 = floor(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// Bootstrap-sampled Gini-split trees; score = fraction of trees voting
// genuine. Node splits minimize weighted child impurity; ties break toward
// the lower feature index, then the lower threshold. Impure nodes split even
// at zero impurity gain while a valid split exists. Leaf vote = majority
// label (tie -> impostor).
class RandomForestClassifier : public Classifier {
 public:
  explicit RandomForestClassifier(RfConfig cfg) : cfg_(cfg) {}

  void train(const std::vector<std::vector<double>>& X, const std::vector<int>& y) override;
  double score(const std::vector<double>& x) const override;
  std::string name() const override { return "rf"; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<RandomForestClassifier> from_json(const nlohmann::json& j);

  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;  // >= 0 marks a leaf
  };
  std::size_t tree_count() const { return trees_.size(); }

 private:
  int grow_node(std::vector<Node>& tree, const std::vector<std::vector<double>>& X,
                const std::vector<int>& y, std::vector<std::size_t>& idx, std::size_t begin,
                std::size_t end, int depth, int mtry, Rng& rng) const;

  RfConfig cfg_;
  std::vector<std::vector<Node>> trees_;
};

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

struct ThresholdResult {
  double tau = 0.5;
  double eer = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

// Accept iff score >= tau. Candidates are all distinct scores plus midpoints
// of consecutive distinct scores; tau minimizes |FAR - FRR| (ties -> smaller
// tau); eer = (FAR + FRR)/2 at tau.
ThresholdResult select_threshold_eer(const std::vector<double>& genuine_scores,
                                     const std::vector<double>& impostor_scores);

struct CvPlan {
  int folds = 5;
  std::vector<int> assignment;  // fold id per sample
};

// Stratified fold assignment: per class, a seeded shuffle dealt round-robin.
// Every fold must receive both classes (SingleClassFoldError).
CvPlan make_cv_plan(const std::vector<int>& labels, int folds, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_metrics;
  double mean = 0.0;
};

using CvTrainer = std::function<std::unique_ptr<Classifier>(
    const std::vector<std::vector<double>>& X, const std::vector<int>& y, int fold)>;
using CvMetric = std::function<double(const Classifier& model,
                                      const std::vector<std::vector<double>>& X,
                                      const std::vector<int>& y)>;

// Trains on folds-1 parts, evaluates the held-out part, returns per-fold
// metric values and their mean.
CvResult cross_validate(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                        const CvPlan& plan, const CvTrainer& trainer, const CvMetric& metric);

}  // namespace touchauth
